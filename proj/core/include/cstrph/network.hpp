#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cstrph {

struct Species {
    std::string name;
    double cp = 0.0;     // J/K/mol
    double h_ref = 0.0;  // J/mol
    double s_ref = 0.0;  // J/K/mol

    bool operator==(const Species&) const = default;
};

/// One reversible reaction sum_j z_j X_j <-> sum_j z'_j X_j with Arrhenius
/// mass-action kinetics. Stoichiometry vectors are indexed like the species list.
struct Reaction {
    std::vector<int> reactant_stoich;
    std::vector<int> product_stoich;
    double k0f = 0.0;
    double Ef = 0.0;
    double k0b = 0.0;
    double Eb = 0.0;

    bool operator==(const Reaction&) const = default;
};

struct ReactorSpec {
    double V = 0.0;       // m^3
    double P = 0.0;       // Pa
    double T_ref = 0.0;   // K
    double lambda = 0.0;  // J/K/s
    double R_gas = 8.314;

    bool operator==(const ReactorSpec&) const = default;
};

struct InletSpec {
    double T_in = 0.0;          // K
    std::vector<double> c_in;   // mol/m^3, one entry per species

    bool operator==(const InletSpec&) const = default;
};

struct NoiseSpec {
    double rho1 = 0.0;  // reaction
    double rho2 = 0.0;  // inlet/outlet flow
    double rho3 = 0.0;  // heat exchange

    bool operator==(const NoiseSpec&) const = default;
};

struct ReactionNetwork {
    std::vector<Species> species;
    std::vector<Reaction> reactions;
    ReactorSpec reactor;
    InletSpec inlet;
    NoiseSpec noise;

    std::size_t num_species() const { return species.size(); }
    std::size_t num_reactions() const { return reactions.size(); }
    /// Index of a species by name; throws std::out_of_range if absent.
    std::size_t species_index(std::string_view name) const;

    bool operator==(const ReactionNetwork&) const = default;
};

struct Diagnostic {
    std::string path;
    std::string message;

    std::string to_string() const
    {
        return message.rfind(path, 0) == 0 ? message : path + ": " + message;
    }
    bool operator==(const Diagnostic&) const = default;
};

/// Syntax-level failure while reading a configuration document.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what);

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    /// The description without the location prefix.
    const std::string& message() const noexcept { return message_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
};

/// A document that parsed but violates one or more network invariants.
class InvalidNetwork : public std::runtime_error {
public:
    explicit InvalidNetwork(std::vector<Diagnostic> diagnostics);

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Parses the sectioned configuration format:
///
///     [species]    <name> cp=.. h_ref=.. s_ref=..
///     [reactions]  2 A + B -> C k0f=.. Ef=.. k0b=.. Eb=..
///     [reactor]    V=.. P=.. T_ref=.. lambda=.. [R_gas=..]
///     [inlet]      T_in=.. [c_<name>=..]...
///     [noise]      rho1=.. rho2=.. rho3=..
///
/// '#' starts a comment. Sections must appear in this order; [reactions] may
/// be omitted or empty. The returned network satisfies validate() == {}.
ReactionNetwork parse_network(std::string_view text);

/// Emits a document that parse_network() maps back to an identical network.
std::string serialize_network(const ReactionNetwork& net);

/// Every invariant violation, each tagged with the path of the offending field.
std::vector<Diagnostic> validate(const ReactionNetwork& net);

ReactionNetwork load_network_file(const std::string& path);

}  // namespace cstrph
