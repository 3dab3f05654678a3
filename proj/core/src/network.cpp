#include "cstrph/network.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace cstrph {

namespace {

constexpr std::array<std::string_view, 5> kSections = {"species", "reactions", "reactor", "inlet",
                                                       "noise"};

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_identifier(std::string_view s)
{
    if (s.empty() || !is_ident_start(s.front())) return false;
    return std::all_of(s.begin(), s.end(), is_ident_char);
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<Token> tokenize(std::string_view line, std::size_t offset = 0)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i >= line.size()) break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        out.push_back({line.substr(start, i - start), offset + start + 1});
    }
    return out;
}

std::string format_double(double v)
{
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

/// key=value pairs collected for one entity, with positions kept for errors.
class KeyValues {
public:
    KeyValues(std::size_t line, std::string owner) : line_(line), owner_(std::move(owner)) {}

    void add(const Token& tok, std::size_t line)
    {
        auto eq = tok.text.find('=');
        if (eq == std::string_view::npos || eq == 0)
            throw ParseError(line, tok.column,
                             "expected key=value, got '" + std::string(tok.text) + "'");
        std::string key(tok.text.substr(0, eq));
        std::string_view value = tok.text.substr(eq + 1);
        if (entries_.count(key))
            throw ParseError(line, tok.column, "duplicate key '" + key + "' for " + owner_);
        entries_.emplace(key, Entry{value, line, tok.column, false});
    }

    std::optional<double> take(const std::string& key)
    {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return to_number(key, it->second);
    }

    double require(const std::string& key)
    {
        auto v = take(key);
        if (!v) throw ParseError(line_, 1, "missing key '" + key + "' for " + owner_);
        return *v;
    }

    /// Values whose key starts with `prefix`, returned with the prefix removed.
    std::vector<std::pair<std::string, double>> take_prefixed(std::string_view prefix)
    {
        std::vector<std::pair<std::string, double>> out;
        for (auto& [key, entry] : entries_) {
            if (key.size() > prefix.size() && key.compare(0, prefix.size(), prefix) == 0) {
                entry.used = true;
                out.emplace_back(key.substr(prefix.size()), to_number(key, entry));
            }
        }
        return out;
    }

    [[noreturn]] void fail_at(const std::string& key, const std::string& what) const
    {
        const auto& e = entries_.at(key);
        throw ParseError(e.line, e.column, what);
    }

    void reject_unused() const
    {
        for (const auto& [key, entry] : entries_)
            if (!entry.used)
                throw ParseError(entry.line, entry.column,
                                 "unknown key '" + key + "' for " + owner_);
    }

private:
    struct Entry {
        std::string_view value;
        std::size_t line;
        std::size_t column;  // column of the key
        bool used;
    };

    double to_number(const std::string& key, const Entry& e) const
    {
        double v = 0.0;
        const char* first = e.value.data();
        const char* last = first + e.value.size();
        if (!e.value.empty() && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (e.value.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
            throw ParseError(e.line, e.column + key.size() + 1,
                             "non-numeric value '" + std::string(e.value) + "' for key '" + key +
                                 "'");
        return v;
    }

    std::size_t line_;
    std::string owner_;
    std::map<std::string, Entry> entries_;
};

struct Line {
    std::size_t number;
    std::string_view text;  // comment stripped, not trimmed
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ReactionNetwork run()
    {
        split_sections();
        for (std::string_view required : {"species", "reactor", "inlet", "noise"})
            if (!sections_.count(std::string(required)))
                throw ParseError(last_line_ + 1, 1,
                                 "missing section [" + std::string(required) + "]");

        ReactionNetwork net;
        parse_species(net);
        parse_reactions(net);
        parse_reactor(net);
        parse_inlet(net);
        parse_noise(net);

        auto diagnostics = validate(net);
        if (!diagnostics.empty()) throw InvalidNetwork(std::move(diagnostics));
        return net;
    }

private:
    struct Section {
        std::size_t header_line;
        std::vector<Line> lines;
    };

    void split_sections()
    {
        std::size_t number = 0;
        std::size_t pos = 0;
        int current = -1;
        while (pos <= text_.size()) {
            auto nl = text_.find('\n', pos);
            std::string_view raw =
                text_.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            ++number;
            pos = (nl == std::string_view::npos) ? text_.size() + 1 : nl + 1;
            if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
            if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
            last_line_ = number;

            std::string_view body = trim(raw);
            if (body.empty()) continue;
            if (body.front() == '[') {
                std::size_t col = raw.find('[') + 1;
                if (body.back() != ']')
                    throw ParseError(number, col, "unterminated section header");
                std::string name(trim(body.substr(1, body.size() - 2)));
                auto it = std::find(kSections.begin(), kSections.end(), name);
                if (it == kSections.end())
                    throw ParseError(number, col, "unknown section [" + name + "]");
                int index = static_cast<int>(it - kSections.begin());
                if (sections_.count(name))
                    throw ParseError(number, col, "duplicate section [" + name + "]");
                if (index < current)
                    throw ParseError(number, col,
                                     "section [" + name + "] out of order; expected order is "
                                     "species, reactions, reactor, inlet, noise");
                current = index;
                sections_.emplace(name, Section{number, {}});
                current_name_ = name;
                continue;
            }
            if (current < 0)
                throw ParseError(number, raw.find_first_not_of(" \t") + 1,
                                 "content before the first section header");
            sections_.at(current_name_).lines.push_back({number, raw});
        }
    }

    void parse_species(ReactionNetwork& net)
    {
        const auto& sec = sections_.at("species");
        std::set<std::string> seen;
        for (const auto& line : sec.lines) {
            auto tokens = tokenize(line.text);
            const Token& name_tok = tokens.front();
            std::string name(name_tok.text);
            if (!is_identifier(name))
                throw ParseError(line.number, name_tok.column, "invalid species name '" + name + "'");
            if (!seen.insert(name).second)
                throw ParseError(line.number, name_tok.column, "duplicate species " + name);
            KeyValues kv(line.number, "species " + name);
            for (std::size_t i = 1; i < tokens.size(); ++i) kv.add(tokens[i], line.number);
            Species sp;
            sp.name = name;
            sp.cp = kv.require("cp");
            sp.h_ref = kv.require("h_ref");
            sp.s_ref = kv.require("s_ref");
            kv.reject_unused();
            net.species.push_back(std::move(sp));
        }
        if (net.species.empty())
            throw ParseError(sec.header_line, 1, "section [species] declares no species");
    }

    std::vector<int> parse_side(const ReactionNetwork& net, std::string_view side, std::size_t line,
                                std::size_t col0)
    {
        std::vector<int> stoich(net.num_species(), 0);
        if (trim(side).empty()) return stoich;
        std::size_t start = 0;
        while (start <= side.size()) {
            auto plus = side.find('+', start);
            std::string_view term =
                side.substr(start, plus == std::string_view::npos ? std::string_view::npos
                                                                  : plus - start);
            auto lead = term.find_first_not_of(" \t");
            std::size_t col = col0 + start + (lead == std::string_view::npos ? 0 : lead);
            term = trim(term);
            if (term.empty()) throw ParseError(line, col, "empty term in reaction expression");

            int coeff = 1;
            std::size_t i = 0;
            while (i < term.size() && std::isdigit(static_cast<unsigned char>(term[i]))) ++i;
            if (i > 0) {
                std::from_chars(term.data(), term.data() + i, coeff);
                std::string_view rest = trim(term.substr(i));
                if (!rest.empty() && rest.front() == '*') rest = trim(rest.substr(1));
                term = rest;
            }
            if (!is_identifier(term))
                throw ParseError(line, col, "invalid term '" + std::string(term) + "'");
            std::size_t idx = 0;
            try {
                idx = net.species_index(term);
            } catch (const std::out_of_range&) {
                throw ParseError(line, col, "unknown species " + std::string(term));
            }
            stoich[idx] += coeff;
            if (plus == std::string_view::npos) break;
            start = plus + 1;
        }
        return stoich;
    }

    void parse_reactions(ReactionNetwork& net)
    {
        auto it = sections_.find("reactions");
        if (it == sections_.end()) return;
        for (const auto& line : it->second.lines) {
            auto tokens = tokenize(line.text);
            auto first_kv = std::find_if(tokens.begin(), tokens.end(), [](const Token& t) {
                return t.text.find('=') != std::string_view::npos;
            });
            std::size_t eq_end =
                first_kv == tokens.end() ? line.text.size() : first_kv->column - 1;
            std::string_view equation = line.text.substr(0, eq_end);
            auto arrow = equation.find("->");
            if (arrow == std::string_view::npos)
                throw ParseError(line.number, tokens.front().column,
                                 "reaction expression needs '->'");
            if (equation.find("->", arrow + 2) != std::string_view::npos)
                throw ParseError(line.number, equation.find("->", arrow + 2) + 1,
                                 "reaction expression has more than one '->'");

            Reaction r;
            r.reactant_stoich = parse_side(net, equation.substr(0, arrow), line.number, 1);
            r.product_stoich =
                parse_side(net, equation.substr(arrow + 2), line.number, arrow + 3);

            KeyValues kv(line.number, "reaction " + std::to_string(net.reactions.size()));
            for (auto t = first_kv; t != tokens.end(); ++t) kv.add(*t, line.number);
            r.k0f = kv.require("k0f");
            r.Ef = kv.require("Ef");
            r.k0b = kv.require("k0b");
            r.Eb = kv.require("Eb");
            kv.reject_unused();
            net.reactions.push_back(std::move(r));
        }
    }

    KeyValues section_kv(const std::string& name)
    {
        const auto& sec = sections_.at(name);
        KeyValues kv(sec.header_line, "[" + name + "]");
        for (const auto& line : sec.lines)
            for (const auto& tok : tokenize(line.text)) kv.add(tok, line.number);
        return kv;
    }

    void parse_reactor(ReactionNetwork& net)
    {
        auto kv = section_kv("reactor");
        net.reactor.V = kv.require("V");
        net.reactor.P = kv.require("P");
        net.reactor.T_ref = kv.require("T_ref");
        net.reactor.lambda = kv.require("lambda");
        if (auto r = kv.take("R_gas")) net.reactor.R_gas = *r;
        kv.reject_unused();
    }

    void parse_inlet(ReactionNetwork& net)
    {
        auto kv = section_kv("inlet");
        net.inlet.T_in = kv.require("T_in");
        net.inlet.c_in.assign(net.num_species(), 0.0);
        for (const auto& [name, value] : kv.take_prefixed("c_")) {
            try {
                net.inlet.c_in[net.species_index(name)] = value;
            } catch (const std::out_of_range&) {
                kv.fail_at("c_" + name, "unknown species " + name);
            }
        }
        kv.reject_unused();
    }

    void parse_noise(ReactionNetwork& net)
    {
        auto kv = section_kv("noise");
        net.noise.rho1 = kv.require("rho1");
        net.noise.rho2 = kv.require("rho2");
        net.noise.rho3 = kv.require("rho3");
        kv.reject_unused();
    }

    std::string_view text_;
    std::map<std::string, Section> sections_;
    std::string current_name_;
    std::size_t last_line_ = 0;
};

std::string side_to_string(const ReactionNetwork& net, const std::vector<int>& stoich)
{
    std::string out;
    for (std::size_t j = 0; j < stoich.size(); ++j) {
        if (stoich[j] == 0) continue;
        if (!out.empty()) out += " + ";
        if (stoich[j] != 1) out += std::to_string(stoich[j]) + " ";
        out += net.species[j].name;
    }
    return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + what),
      line_(line),
      column_(column),
      message_(what)
{
}

InvalidNetwork::InvalidNetwork(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
          std::string msg = "invalid network:";
          for (const auto& d : diagnostics) msg += "\n  " + d.to_string();
          return msg;
      }()),
      diagnostics_(std::move(diagnostics))
{
}

std::size_t ReactionNetwork::species_index(std::string_view name) const
{
    for (std::size_t j = 0; j < species.size(); ++j)
        if (species[j].name == name) return j;
    throw std::out_of_range("unknown species " + std::string(name));
}

std::vector<Diagnostic> validate(const ReactionNetwork& net)
{
    std::vector<Diagnostic> out;
    auto fail = [&](std::string path, std::string msg) {
        out.push_back({std::move(path), std::move(msg)});
    };
    auto check = [&](bool ok, const std::string& path, const std::string& requirement) {
        if (!ok) fail(path, path + " " + requirement);
    };

    const std::size_t p = net.num_species();
    if (p == 0) fail("species", "species list is empty");
    std::set<std::string> names;
    for (const auto& sp : net.species) {
        const std::string base = "species." + sp.name;
        if (!is_identifier(sp.name)) fail(base, base + " name is not an identifier");
        if (!names.insert(sp.name).second) fail(base, base + " is declared more than once");
        check(std::isfinite(sp.cp) && sp.cp > 0.0, base + ".cp", "must be > 0");
        check(std::isfinite(sp.h_ref), base + ".h_ref", "must be finite");
        check(std::isfinite(sp.s_ref), base + ".s_ref", "must be finite");
    }

    for (std::size_t i = 0; i < net.reactions.size(); ++i) {
        const auto& r = net.reactions[i];
        const std::string base = "reactions." + std::to_string(i);
        bool sized = true;
        if (r.reactant_stoich.size() != p) {
            fail(base + ".reactant_stoich",
                 base + ".reactant_stoich length must equal the species count");
            sized = false;
        }
        if (r.product_stoich.size() != p) {
            fail(base + ".product_stoich",
                 base + ".product_stoich length must equal the species count");
            sized = false;
        }
        if (sized) {
            if (std::any_of(r.reactant_stoich.begin(), r.reactant_stoich.end(),
                            [](int z) { return z < 0; }))
                fail(base + ".reactant_stoich", base + ".reactant_stoich must be >= 0");
            if (std::any_of(r.product_stoich.begin(), r.product_stoich.end(),
                            [](int z) { return z < 0; }))
                fail(base + ".product_stoich", base + ".product_stoich must be >= 0");
            if (r.reactant_stoich == r.product_stoich)
                fail(base, "reaction " + std::to_string(i) + " has zero net stoichiometry");
        }
        check(std::isfinite(r.k0f) && r.k0f >= 0.0, base + ".k0f", "must be >= 0");
        check(std::isfinite(r.k0b) && r.k0b >= 0.0, base + ".k0b", "must be >= 0");
        check(std::isfinite(r.Ef) && r.Ef >= 0.0, base + ".Ef", "must be >= 0");
        check(std::isfinite(r.Eb) && r.Eb >= 0.0, base + ".Eb", "must be >= 0");
    }

    const auto& rc = net.reactor;
    check(std::isfinite(rc.V) && rc.V > 0.0, "reactor.V", "must be > 0");
    check(std::isfinite(rc.P) && rc.P >= 0.0, "reactor.P", "must be >= 0");
    check(std::isfinite(rc.T_ref) && rc.T_ref > 0.0, "reactor.T_ref", "must be > 0");
    check(std::isfinite(rc.lambda) && rc.lambda >= 0.0, "reactor.lambda", "must be >= 0");
    check(std::isfinite(rc.R_gas) && rc.R_gas > 0.0, "reactor.R_gas", "must be > 0");

    check(std::isfinite(net.inlet.T_in) && net.inlet.T_in > 0.0, "inlet.T_in", "must be > 0");
    if (net.inlet.c_in.size() != p) {
        fail("inlet.c_in", "inlet.c_in length must equal the species count");
    } else {
        bool any_positive = false;
        for (std::size_t j = 0; j < p; ++j) {
            double c = net.inlet.c_in[j];
            check(std::isfinite(c) && c >= 0.0, "inlet.c_" + net.species[j].name, "must be >= 0");
            any_positive = any_positive || c > 0.0;
        }
        if (!any_positive) fail("inlet.c_in", "inlet.c_in needs at least one entry > 0");
    }

    check(std::isfinite(net.noise.rho1) && net.noise.rho1 >= 0.0, "noise.rho1", "must be >= 0");
    check(std::isfinite(net.noise.rho2) && net.noise.rho2 >= 0.0, "noise.rho2", "must be >= 0");
    check(std::isfinite(net.noise.rho3) && net.noise.rho3 >= 0.0, "noise.rho3", "must be >= 0");
    return out;
}

ReactionNetwork parse_network(std::string_view text) { return Parser(text).run(); }

std::string serialize_network(const ReactionNetwork& net)
{
    std::ostringstream os;
    os << "[species]\n";
    for (const auto& sp : net.species)
        os << sp.name << " cp=" << format_double(sp.cp) << " h_ref=" << format_double(sp.h_ref)
           << " s_ref=" << format_double(sp.s_ref) << "\n";

    os << "\n[reactions]\n";
    for (const auto& r : net.reactions)
        os << side_to_string(net, r.reactant_stoich) << " -> "
           << side_to_string(net, r.product_stoich) << " k0f=" << format_double(r.k0f)
           << " Ef=" << format_double(r.Ef) << " k0b=" << format_double(r.k0b)
           << " Eb=" << format_double(r.Eb) << "\n";

    const auto& rc = net.reactor;
    os << "\n[reactor]\n"
       << "V=" << format_double(rc.V) << " P=" << format_double(rc.P)
       << " T_ref=" << format_double(rc.T_ref) << " lambda=" << format_double(rc.lambda)
       << " R_gas=" << format_double(rc.R_gas) << "\n";

    os << "\n[inlet]\n"
       << "T_in=" << format_double(net.inlet.T_in);
    for (std::size_t j = 0; j < net.species.size() && j < net.inlet.c_in.size(); ++j)
        os << " c_" << net.species[j].name << "=" << format_double(net.inlet.c_in[j]);
    os << "\n";

    os << "\n[noise]\n"
       << "rho1=" << format_double(net.noise.rho1) << " rho2=" << format_double(net.noise.rho2)
       << " rho3=" << format_double(net.noise.rho3) << "\n";
    return os.str();
}

ReactionNetwork load_network_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open network file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(buf.str());
}

}  // namespace cstrph
