#include "qftion/scenario.hpp"

#include "qftion/dyson.hpp"
#include "qftion/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace qftion {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& text, int line)
{
    double v = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ParseError(line, "expected a number, got '" + text + "'");
    return v;
}

int parse_int(const std::string& text, int line)
{
    int v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ParseError(line, "expected an integer, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& text, int line)
{
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ParseError(line, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text, std::size_t count, int line)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item), line));
    if (out.size() != count)
        throw ParseError(line, "expected " + std::to_string(count) + " comma-separated values");
    return out;
}

Sector parse_sector(const std::string& text, int line)
{
    if (text == "vac") return Sector::vac;
    if (text == "f") return Sector::f;
    if (text == "fbar") return Sector::fbar;
    if (text == "pair") return Sector::pair;
    throw ParseError(line, "unknown state label '" + text + "' (vac, f, fbar, pair)");
}

RunMode parse_mode(const std::string& text, int line)
{
    if (text == "field") return RunMode::field;
    if (text == "ion") return RunMode::ion;
    if (text == "ion-spectator") return RunMode::ion_spectator;
    if (text == "dyson") return RunMode::dyson;
    if (text == "multimode") return RunMode::multimode;
    throw ParseError(line, "unknown run mode '" + text + "'");
}

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"couplings", {"g1", "g2", "sigma_t", "T", "delta", "omega0", "k0"}},
        {"initial", {"state", "boson_n"}},
        {"integration", {"dt", "t_end", "n_max", "n_max_cap", "method"}},
        {"run", {"mode", "target", "target_n", "output", "rotating_only", "normal_ordering",
                 "spectator_sign"}},
        {"packets", {"fermion", "antifermion", "boson", "g"}},
    };
    return keys;
}

bool repeatable(const std::string& section, const std::string& key)
{
    return section == "packets" && (key == "fermion" || key == "antifermion" || key == "boson");
}

double* coupling_slot(CouplingProfile& p, const std::string& key)
{
    if (key == "g1") return &p.g1;
    if (key == "g2") return &p.g2;
    if (key == "sigma_t") return &p.sigma_t;
    if (key == "T") return &p.T;
    if (key == "delta") return &p.delta;
    if (key == "omega0") return &p.omega0;
    if (key == "k0") return &p.k0;
    return nullptr;
}

} // namespace

Scenario parse_scenario(std::istream& in, const std::filesystem::path& source)
{
    Scenario s;
    s.source = source;
    std::string section;
    std::set<std::string> seen;
    std::string line_text;
    int line = 0;
    bool have_t_end = false;
    bool have_target = false;
    bool have_target_n = false;
    std::set<std::string> explicit_couplings;
    struct PendingPacket {
        Species species;
        std::vector<double> v;
        int line;
    };
    std::vector<PendingPacket> packets;

    while (std::getline(in, line_text)) {
        ++line;
        std::string text = line_text;
        const auto comment = text.find_first_of("#;");
        if (comment != std::string::npos) text.erase(comment);
        text = trim(text);
        if (text.empty()) continue;

        if (text.front() == '[') {
            if (text.back() != ']') throw ParseError(line, "malformed section header");
            section = trim(std::string_view(text).substr(1, text.size() - 2));
            if (!schema().count(section)) throw ParseError(line, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected key = value");
        const std::string key = trim(std::string_view(text).substr(0, eq));
        const std::string value = trim(std::string_view(text).substr(eq + 1));
        if (section.empty()) throw ParseError(line, "key '" + key + "' outside any section");
        if (!schema().at(section).count(key))
            throw ParseError(line, "unknown key '" + key + "' in [" + section + "]");
        if (value.empty()) throw ParseError(line, "missing value for '" + key + "'");
        const std::string qualified = section + "." + key;
        if (!repeatable(section, key) && !seen.insert(qualified).second)
            throw ParseError(line, "duplicate key '" + key + "' in [" + section + "]");

        if (section == "couplings") {
            *coupling_slot(s.profile, key) = parse_number(value, line);
            explicit_couplings.insert(key);
        } else if (section == "initial") {
            if (key == "state") s.initial = parse_sector(value, line);
            else s.boson_n = parse_int(value, line);
        } else if (section == "integration") {
            if (key == "dt") s.integration.dt = parse_number(value, line);
            else if (key == "t_end") {
                s.integration.t_end = parse_number(value, line);
                have_t_end = true;
            } else if (key == "n_max") s.n_max = parse_int(value, line);
            else if (key == "n_max_cap") s.n_max_cap = parse_int(value, line);
            else if (value == "magnus4") s.integration.method = Method::magnus4;
            else if (value == "midpoint") s.integration.method = Method::midpoint_exponential;
            else throw ParseError(line, "unknown method '" + value + "' (magnus4, midpoint)");
        } else if (section == "run") {
            if (key == "mode") s.mode = parse_mode(value, line);
            else if (key == "target") {
                s.target = parse_sector(value, line);
                have_target = true;
            } else if (key == "target_n") {
                s.target_n = parse_int(value, line);
                have_target_n = true;
            } else if (key == "output") s.output = value;
            else if (key == "rotating_only") s.rotating_only = parse_bool(value, line);
            else if (key == "normal_ordering") s.normal_ordering = parse_bool(value, line);
            else s.spectator_sign = parse_int(value, line);
        } else { // packets
            if (key == "g") s.bare_g = parse_number(value, line);
            else if (key == "boson") {
                const auto v = parse_list(value, 2, line);
                s.bosons.push_back({v[0], v[1], 0});
            } else {
                packets.push_back({key == "fermion" ? Species::fermion : Species::antifermion,
                                   parse_list(value, 3, line), line});
            }
        }
    }

    for (const auto& p : packets) {
        try {
            s.packets.emplace_back(p.v[0], p.v[1], p.v[2], p.species);
        } catch (const DomainError& e) {
            throw ValidationError("line " + std::to_string(p.line) + ": " + e.what());
        }
    }

    if (!have_target) s.target = s.initial;
    if (!have_target_n) s.target_n = have_target ? 0 : s.boson_n;

    if (s.mode == RunMode::multimode) {
        if (s.packets.empty()) throw ValidationError("multimode runs need [packets] entries");
        if (!s.bare_g) throw ValidationError("multimode runs need [packets] g");
        if (s.bosons.empty()) s.bosons.push_back({s.profile.k0, s.profile.omega0, 0});
    } else if (!s.packets.empty()) {
        for (const char* k : {"g1", "g2", "sigma_t", "T", "delta"})
            if (explicit_couplings.count(k))
                throw ValidationError(std::string("[couplings] ") + k +
                                      " conflicts with packet-derived parameters");
        if (s.packets.size() != 2 || s.packets[0].species() == s.packets[1].species())
            throw ValidationError("[packets] must hold one fermion and one antifermion");
        if (!s.bare_g) throw ValidationError("[packets] needs g");
        if (!s.bosons.empty()) throw ValidationError("[packets] boson entries are multimode-only");
        const WavePacket& f = s.packets[0].species() == Species::fermion ? s.packets[0] : s.packets[1];
        const WavePacket& fbar = &f == &s.packets[0] ? s.packets[1] : s.packets[0];
        try {
            const EffectiveFit fit =
                fit_effective_params(f, fbar, s.profile.k0, s.profile.omega0, *s.bare_g);
            s.profile = fit.profile;
            s.fit_residual = fit.residual;
        } catch (const DomainError& e) {
            throw ValidationError(e.what());
        } catch (const ReductionError& e) {
            throw ValidationError(std::string("reduction invalid: ") + e.what());
        }
    }
    if (!have_t_end) s.integration.t_end = s.profile.T;
    if (s.profile.slow_boson_warning())
        s.warnings.push_back("|k0| > 0.1 omega0: the slow-boson reduction is questionable");

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open scenario file " + path.string());
    return parse_scenario(in, path);
}

void Scenario::validate() const
{
    profile.validate();
    if (!(integration.dt > 0.0) || !std::isfinite(integration.dt))
        throw ValidationError("dt must be positive");
    if (!(integration.t_end >= 0.0) || !std::isfinite(integration.t_end))
        throw ValidationError("t_end must be >= 0");
    if (n_max < 1) throw ValidationError("n_max must be >= 1");
    if (n_max_cap < n_max) throw ValidationError("n_max_cap must be >= n_max");
    if (boson_n < 0 || boson_n >= n_max) throw ValidationError("boson_n must lie in [0, n_max)");
    if (target_n < 0 || target_n >= n_max) throw ValidationError("target_n must lie in [0, n_max)");
    if (spectator_sign != 1 && spectator_sign != -1)
        throw ValidationError("spectator_sign must be 1 or -1");
    if (mode == RunMode::dyson && boson_n + max_dyson_order > n_max)
        throw ValidationError("dyson mode needs n_max >= boson_n + 2");
    if (mode == RunMode::multimode) {
        if (!std::isfinite(*bare_g)) throw ValidationError("bare g must be finite");
        for (const auto& b : bosons)
            if (!(b.omega > 0.0)) throw ValidationError("boson frequencies must be positive");
        const Sector need = initial;
        bool has_f = false, has_fbar = false;
        for (const auto& p : packets) (p.species() == Species::fermion ? has_f : has_fbar) = true;
        auto available = [&](Sector sec) {
            return (!(sec == Sector::f || sec == Sector::pair) || has_f) &&
                   (!(sec == Sector::fbar || sec == Sector::pair) || has_fbar);
        };
        if (!available(need) || !available(target))
            throw ValidationError("initial/target state needs a packet of the missing species");
        (void)multimode(n_max).basis(); // dimension cap
    }
}

void set_coupling(Scenario& s, const std::string& key, double value)
{
    double* slot = coupling_slot(s.profile, key);
    if (!slot) throw ValidationError("'" + key + "' is not a [couplings] entry");
    *slot = value;
}

FieldScenario Scenario::field(int n) const
{
    FieldScenario f;
    f.profile = profile;
    f.basis = FockBasis(n);
    f.rotating_only = rotating_only;
    f.normal_ordering = normal_ordering;
    return f;
}

MultimodeScenario Scenario::multimode(int n) const
{
    MultimodeScenario m;
    m.packets = packets;
    m.bosons = bosons;
    for (auto& b : m.bosons) b.n_max = n;
    m.bare_g = bare_g.value_or(0.0);
    return m;
}

} // namespace qftion
