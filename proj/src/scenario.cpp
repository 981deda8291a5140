#include "alignlab/scenario.hpp"

#include "alignlab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cinttypes>
#include <climits>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace alignlab {

PlannerModel ScenarioConfig::model() const {
    PlannerModel m;
    m.needs.reserve(needs.size());
    for (const auto& n : needs) m.needs.push_back(n.params);
    m.ideation = ideation;
    m.pipeline = pipeline;
    return m;
}

ExperientialState ScenarioConfig::initial_state() const {
    ExperientialState x;
    x.time = 0.0;
    x.sat.reserve(needs.size());
    for (const auto& n : needs) x.sat.push_back(n.initial);
    return x;
}

WeightVector ScenarioConfig::weights() const {
    WeightVector w;
    w.w.reserve(needs.size());
    for (std::size_t i = 0; i < needs.size(); ++i) {
        w.w.push_back(needs[i].params.weight);
        if (needs[i].meaning) w.meaning_index = i;
    }
    return w;
}

std::vector<double> ScenarioConfig::error_bounds() const {
    std::vector<double> k;
    k.reserve(needs.size());
    for (const auto& n : needs)
        k.push_back(n.error_bound_set
                        ? n.params.error_bound
                        : default_error_bound(n.params, ideation, pipeline.sat_max));
    return k;
}

std::string ParseResult::issues_text() const {
    std::ostringstream os;
    for (const auto& i : issues) {
        if (i.line > 0) os << "line " << i.line << ": ";
        os << i.message << "\n";
    }
    return os.str();
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string section; // "need.3" for the fourth [need] block
    std::string key;
    std::string value;
    int line = 0;
};

struct Collector {
    std::vector<ParseIssue>* issues;
    void add(int line, const std::string& msg) { issues->push_back({line, msg}); }
};

bool parse_double(const std::string& s, double& out) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) return false;
    out = v;
    return true;
}

bool parse_int(const std::string& s, int& out) {
    errno = 0;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) return false;
    if (v < INT_MIN || v > INT_MAX) return false;
    out = static_cast<int>(v);
    return true;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE) return false;
    out = v;
    return true;
}

bool parse_bool(const std::string& s, bool& out) {
    if (s == "true") {
        out = true;
        return true;
    }
    if (s == "false") {
        out = false;
        return true;
    }
    return false;
}

// Applies one key=value to the config. Returns false when the key does not
// belong to the section (reported by the caller with the line number).
bool apply_key(ScenarioConfig& cfg, const std::string& section, std::size_t index,
               const std::string& key, const std::string& value, int line,
               Collector& issues) {
    auto bad_value = [&](const char* type) {
        issues.add(line, "key '" + key + "' in [" + section + "] expects " + type +
                             ", got '" + value + "'");
        return true; // key itself was known
    };
    auto set_d = [&](double& slot) {
        double v;
        if (!parse_double(value, v)) return bad_value("a number");
        slot = v;
        return true;
    };

    if (section == "scenario") {
        if (key == "name") {
            cfg.name = value;
            return true;
        }
        if (key == "seed") {
            std::uint64_t v;
            if (!parse_u64(value, v)) return bad_value("an unsigned integer");
            cfg.seed = v;
            return true;
        }
        if (key == "sat_max") return set_d(cfg.pipeline.sat_max);
        if (key == "eta") return set_d(cfg.pipeline.eta);
        if (key == "share") {
            if (value == "saturating")
                cfg.pipeline.share = ShareMode::saturating;
            else if (value == "linear")
                cfg.pipeline.share = ShareMode::linear;
            else
                return bad_value("'saturating' or 'linear'");
            return true;
        }
        return false;
    }
    if (section == "production") {
        if (key == "tfp") return set_d(cfg.production.tfp);
        if (key == "alpha") return set_d(cfg.production.alpha);
        if (key == "capital") return set_d(cfg.production.capital);
        if (key == "labor") return set_d(cfg.production.labor);
        return false;
    }
    if (section == "ideation") {
        if (key == "c0") return set_d(cfg.ideation.c0);
        if (key == "lambda") return set_d(cfg.ideation.lambda_decay);
        return false;
    }
    if (section == "solver") {
        if (key == "rho") return set_d(cfg.solver.rho);
        if (key == "horizon") return set_d(cfg.solver.horizon);
        if (key == "steps") {
            int v;
            if (!parse_int(value, v)) return bad_value("an integer");
            cfg.solver.steps = v;
            return true;
        }
        if (key == "relaxation") return set_d(cfg.solver.relaxation);
        if (key == "tol") return set_d(cfg.solver.tol);
        if (key == "max_iter") {
            int v;
            if (!parse_int(value, v)) return bad_value("an integer");
            cfg.solver.max_iter = v;
            return true;
        }
        if (key == "costate_mode") {
            if (value == "present_value")
                cfg.solver.costate_mode = CostateMode::present_value;
            else if (value == "current_value")
                cfg.solver.costate_mode = CostateMode::current_value;
            else if (value == "paper_literal")
                cfg.solver.costate_mode = CostateMode::paper_literal;
            else
                return bad_value("'present_value', 'current_value' or 'paper_literal'");
            return true;
        }
        if (key == "control_mode") {
            if (value == "scalar_bounded")
                cfg.solver.control_mode = ControlMode::scalar_bounded;
            else if (value == "allocation_simplex")
                cfg.solver.control_mode = ControlMode::allocation_simplex;
            else
                return bad_value("'scalar_bounded' or 'allocation_simplex'");
            return true;
        }
        if (key == "y_max") {
            cfg.y_max_set = true;
            return set_d(cfg.solver.y_max);
        }
        return false;
    }
    if (section == "factors") {
        if (key == "labor_employed") return set_d(cfg.factors.labor_employed);
        if (key == "labor_idle") return set_d(cfg.factors.labor_idle);
        if (key == "capital_employed") return set_d(cfg.factors.capital_employed);
        if (key == "capital_idle") return set_d(cfg.factors.capital_idle);
        return false;
    }
    if (section == "need") {
        if (index >= cfg.needs.size())
            throw Error("internal: need index out of range");
        NeedConfig& n = cfg.needs[index];
        if (key == "weight") return set_d(n.params.weight);
        if (key == "delta") return set_d(n.params.delta);
        if (key == "desired") return set_d(n.params.desired);
        if (key == "effectiveness") return set_d(n.params.effectiveness);
        if (key == "initial") return set_d(n.initial);
        if (key == "error_bound") {
            n.error_bound_set = true;
            return set_d(n.params.error_bound);
        }
        if (key == "mask") {
            bool v;
            if (!parse_bool(value, v)) return bad_value("'true' or 'false'");
            n.params.ethics_mask = v;
            return true;
        }
        if (key == "meaning") {
            bool v;
            if (!parse_bool(value, v)) return bad_value("'true' or 'false'");
            n.meaning = v;
            return true;
        }
        return false;
    }
    if (section == "frontier") {
        if (!cfg.frontier) cfg.frontier = FrontierConfig{};
        if (key == "discovery_slope") return set_d(cfg.frontier->discovery_slope);
        if (key == "new_weight") return set_d(cfg.frontier->new_weight);
        if (key == "new_attainable") return set_d(cfg.frontier->new_attainable);
        if (key == "step") return set_d(cfg.frontier->step);
        return false;
    }
    if (section == "frontier.add") {
        if (index >= cfg.frontier_adds.size())
            throw Error("internal: frontier add index out of range");
        FrontierAdd& a = cfg.frontier_adds[index];
        if (key == "weight") return set_d(a.weight);
        if (key == "attainable") return set_d(a.attainable);
        return false;
    }
    return false;
}

const char* kKnownSections[] = {"scenario", "production", "ideation", "solver",
                                "factors",  "need",       "frontier", "frontier.add"};

bool known_section(const std::string& s) {
    for (const char* k : kKnownSections)
        if (s == k) return true;
    return false;
}

} // namespace

std::vector<ParseIssue> validate_scenario(const ScenarioConfig& cfg) {
    std::vector<ParseIssue> issues;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) issues.push_back({0, msg});
    };

    double sat_max = cfg.pipeline.sat_max;
    require(sat_max > 0.0, "sat_max must be positive");
    require(cfg.pipeline.eta > 0.0, "eta must be positive");

    require(cfg.production.tfp > 0.0, "tfp must be positive");
    require(cfg.production.alpha > 0.0 && cfg.production.alpha < 1.0,
            "alpha outside (0,1)");
    require(cfg.production.capital >= 0.0, "capital must be non-negative");
    require(cfg.production.labor >= 0.0, "labor must be non-negative");

    require(cfg.ideation.c0 > 0.0, "c0 must be positive");
    require(cfg.ideation.lambda_decay >= 0.0, "lambda must be non-negative");

    require(cfg.solver.rho > 0.0, "rho must be positive");
    require(cfg.solver.horizon > 0.0, "horizon must be positive");
    require(cfg.solver.steps >= 2, "steps must be at least 2");
    require(cfg.solver.relaxation > 0.0 && cfg.solver.relaxation <= 1.0,
            "relaxation outside (0,1]");
    require(cfg.solver.tol > 0.0, "tol must be positive");
    require(cfg.solver.max_iter >= 1, "max_iter must be at least 1");
    if (cfg.y_max_set) require(cfg.solver.y_max > 0.0, "y_max must be positive");

    require(cfg.factors.labor_employed >= 0.0, "labor_employed must be non-negative");
    require(cfg.factors.labor_idle >= 0.0, "labor_idle must be non-negative");
    require(cfg.factors.capital_employed >= 0.0,
            "capital_employed must be non-negative");
    require(cfg.factors.capital_idle >= 0.0, "capital_idle must be non-negative");

    require(!cfg.needs.empty(), "missing required section [need] (N >= 1)");
    int meaning_count = 0;
    for (std::size_t i = 0; i < cfg.needs.size(); ++i) {
        const NeedConfig& n = cfg.needs[i];
        std::string tag = "[need] #" + std::to_string(i + 1) + ": ";
        require(n.params.weight >= 0.0, tag + "weight must be non-negative");
        require(n.params.delta >= 0.0, tag + "delta must be non-negative");
        require(n.params.desired >= 0.0 && n.params.desired <= sat_max,
                tag + "desired outside [0, sat_max]");
        require(n.params.effectiveness >= 0.0,
                tag + "effectiveness must be non-negative");
        require(n.params.error_bound >= 0.0, tag + "error_bound must be non-negative");
        require(n.initial >= 0.0 && n.initial <= sat_max,
                tag + "initial outside [0, sat_max]");
        if (n.meaning) {
            ++meaning_count;
            require(n.params.weight > 0.0,
                    tag + "the meaning dimension must carry a positive weight");
        }
    }
    require(meaning_count <= 1, "at most one need may be marked as the meaning "
                                "dimension");

    if (cfg.frontier) {
        require(cfg.frontier->discovery_slope >= 0.0,
                "[frontier] discovery_slope must be non-negative");
        require(cfg.frontier->new_weight >= 0.0,
                "[frontier] new_weight must be non-negative");
        require(cfg.frontier->new_attainable >= 0.0 &&
                    cfg.frontier->new_attainable <= sat_max,
                "[frontier] new_attainable outside [0, sat_max]");
        require(cfg.frontier->step > 0.0, "[frontier] step must be positive");
    }
    for (std::size_t i = 0; i < cfg.frontier_adds.size(); ++i) {
        std::string tag = "[frontier.add] #" + std::to_string(i + 1) + ": ";
        require(cfg.frontier_adds[i].weight >= 0.0,
                tag + "weight must be non-negative");
        require(cfg.frontier_adds[i].attainable >= 0.0 &&
                    cfg.frontier_adds[i].attainable <= sat_max,
                tag + "attainable outside [0, sat_max]");
    }
    return issues;
}

ParseResult parse_scenario(const std::string& text,
                           const std::vector<std::string>& overrides) {
    ParseResult result;
    Collector issues{&result.issues};

    ScenarioConfig cfg;

    // Pass 1: tokenize into section-tagged entries.
    std::vector<Entry> entries;
    {
        std::istringstream in(text);
        std::string raw;
        int line_no = 0;
        std::string section;
        std::size_t need_count = 0, add_count = 0;
        bool seen[8] = {};
        while (std::getline(in, raw)) {
            ++line_no;
            std::string line = raw;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;

            if (line.front() == '[') {
                if (line.back() != ']') {
                    issues.add(line_no, "unterminated section header '" + raw + "'");
                    section.clear();
                    continue;
                }
                std::string name = trim(line.substr(1, line.size() - 2));
                if (!known_section(name)) {
                    issues.add(line_no, "unknown section [" + name + "]");
                    section.clear();
                    continue;
                }
                if (name == "need") {
                    cfg.needs.emplace_back();
                    section = "need." + std::to_string(need_count++);
                } else if (name == "frontier.add") {
                    cfg.frontier_adds.emplace_back();
                    section = "frontier.add." + std::to_string(add_count++);
                } else {
                    // Singleton sections may not repeat.
                    for (std::size_t s = 0; s < 8; ++s) {
                        if (name != kKnownSections[s]) continue;
                        if (seen[s])
                            issues.add(line_no,
                                       "duplicate section [" + name + "]");
                        seen[s] = true;
                    }
                    section = name;
                    if (name == "frontier" && !cfg.frontier)
                        cfg.frontier = FrontierConfig{};
                }
                continue;
            }

            std::size_t eq = line.find('=');
            if (eq == std::string::npos) {
                issues.add(line_no, "expected 'key = value', got '" + raw + "'");
                continue;
            }
            if (section.empty()) {
                issues.add(line_no, "key outside of any section: '" + raw + "'");
                continue;
            }
            Entry e;
            e.section = section;
            e.key = trim(line.substr(0, eq));
            e.value = trim(line.substr(eq + 1));
            e.line = line_no;
            entries.push_back(std::move(e));
        }

        const char* required[] = {"production", "ideation", "solver", "factors"};
        for (const char* r : required) {
            bool found = false;
            for (std::size_t s = 0; s < 8; ++s)
                if (std::string(r) == kKnownSections[s] && seen[s]) found = true;
            if (!found)
                issues.add(0, std::string("missing required section [") + r + "]");
        }
        if (cfg.needs.empty())
            issues.add(0, "missing required section [need] (N >= 1)");
    }

    // Pass 2: apply entries.
    for (const auto& e : entries) {
        std::string base = e.section;
        std::size_t index = 0;
        std::size_t dot = base.find_last_of('.');
        if (dot != std::string::npos &&
            base.find_first_not_of("0123456789", dot + 1) == std::string::npos) {
            index = std::strtoull(base.c_str() + dot + 1, nullptr, 10);
            base = base.substr(0, dot);
        }
        if (!apply_key(cfg, base, index, e.key, e.value, e.line, issues))
            issues.add(e.line, "unknown key '" + e.key + "' in section [" + base + "]");
    }

    // Pass 3: overrides (dotted paths), applied after parsing and before
    // validation.
    for (const auto& ov : overrides) {
        std::size_t eq = ov.find('=');
        if (eq == std::string::npos) {
            issues.add(0, "override '" + ov + "' is not of the form key=value");
            continue;
        }
        std::string path = trim(ov.substr(0, eq));
        std::string value = trim(ov.substr(eq + 1));
        std::size_t dot = path.find('.');
        if (dot == std::string::npos) {
            issues.add(0, "override key '" + path + "' lacks a section prefix");
            continue;
        }
        std::string section = path.substr(0, dot);
        std::string rest = path.substr(dot + 1);
        std::size_t index = 0;
        if (section == "need") {
            std::size_t dot2 = rest.find('.');
            if (dot2 == std::string::npos) {
                issues.add(0, "override key 'need." + rest +
                                  "' must be need.<index>.<key>");
                continue;
            }
            std::string idx = rest.substr(0, dot2);
            if (idx.find_first_not_of("0123456789") != std::string::npos) {
                issues.add(0, "override need index '" + idx + "' is not a number");
                continue;
            }
            index = std::strtoull(idx.c_str(), nullptr, 10);
            rest = rest.substr(dot2 + 1);
            if (index >= cfg.needs.size()) {
                issues.add(0, "override need index " + idx + " out of range");
                continue;
            }
        }
        if (!known_section(section)) {
            issues.add(0, "override references unknown section '" + section + "'");
            continue;
        }
        if (!apply_key(cfg, section, index, rest, value, 0, issues))
            issues.add(0, "unknown override key '" + path + "'");
    }

    // Resolve the default control capacity from the employed factors.
    if (!cfg.y_max_set && result.issues.empty()) {
        ProductionParams employed = cfg.production;
        employed.capital = cfg.factors.capital_employed;
        employed.labor = cfg.factors.labor_employed;
        if (employed.alpha > 0.0 && employed.alpha < 1.0 && employed.tfp > 0.0 &&
            employed.capital >= 0.0 && employed.labor >= 0.0) {
            double y = cobb_douglas(employed);
            if (y > 0.0) {
                cfg.solver.y_max = y;
            } else {
                issues.add(0, "y_max not set and the employed factors produce zero "
                              "output; set [solver] y_max explicitly");
            }
        }
    }

    auto invariant_issues = validate_scenario(cfg);
    result.issues.insert(result.issues.end(), invariant_issues.begin(),
                         invariant_issues.end());
    if (result.issues.empty()) result.config = std::move(cfg);
    return result;
}

std::string emit_scenario(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "[scenario]\n";
    os << "name = " << cfg.name << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "sat_max = " << fmt_double(cfg.pipeline.sat_max) << "\n";
    os << "eta = " << fmt_double(cfg.pipeline.eta) << "\n";
    os << "share = " << to_string(cfg.pipeline.share) << "\n\n";

    os << "[production]\n";
    os << "tfp = " << fmt_double(cfg.production.tfp) << "\n";
    os << "alpha = " << fmt_double(cfg.production.alpha) << "\n";
    os << "capital = " << fmt_double(cfg.production.capital) << "\n";
    os << "labor = " << fmt_double(cfg.production.labor) << "\n\n";

    os << "[ideation]\n";
    os << "c0 = " << fmt_double(cfg.ideation.c0) << "\n";
    os << "lambda = " << fmt_double(cfg.ideation.lambda_decay) << "\n\n";

    os << "[solver]\n";
    os << "rho = " << fmt_double(cfg.solver.rho) << "\n";
    os << "horizon = " << fmt_double(cfg.solver.horizon) << "\n";
    os << "steps = " << cfg.solver.steps << "\n";
    os << "relaxation = " << fmt_double(cfg.solver.relaxation) << "\n";
    os << "tol = " << fmt_double(cfg.solver.tol) << "\n";
    os << "max_iter = " << cfg.solver.max_iter << "\n";
    os << "costate_mode = " << to_string(cfg.solver.costate_mode) << "\n";
    os << "control_mode = " << to_string(cfg.solver.control_mode) << "\n";
    os << "y_max = " << fmt_double(cfg.solver.y_max) << "\n\n";

    os << "[factors]\n";
    os << "labor_employed = " << fmt_double(cfg.factors.labor_employed) << "\n";
    os << "labor_idle = " << fmt_double(cfg.factors.labor_idle) << "\n";
    os << "capital_employed = " << fmt_double(cfg.factors.capital_employed) << "\n";
    os << "capital_idle = " << fmt_double(cfg.factors.capital_idle) << "\n";

    for (const auto& n : cfg.needs) {
        os << "\n[need]\n";
        os << "weight = " << fmt_double(n.params.weight) << "\n";
        os << "delta = " << fmt_double(n.params.delta) << "\n";
        os << "desired = " << fmt_double(n.params.desired) << "\n";
        os << "effectiveness = " << fmt_double(n.params.effectiveness) << "\n";
        os << "initial = " << fmt_double(n.initial) << "\n";
        os << "mask = " << (n.params.ethics_mask ? "true" : "false") << "\n";
        if (n.meaning) os << "meaning = true\n";
        if (n.error_bound_set)
            os << "error_bound = " << fmt_double(n.params.error_bound) << "\n";
    }

    if (cfg.frontier) {
        os << "\n[frontier]\n";
        os << "discovery_slope = " << fmt_double(cfg.frontier->discovery_slope) << "\n";
        os << "new_weight = " << fmt_double(cfg.frontier->new_weight) << "\n";
        os << "new_attainable = " << fmt_double(cfg.frontier->new_attainable) << "\n";
        os << "step = " << fmt_double(cfg.frontier->step) << "\n";
    }
    for (const auto& a : cfg.frontier_adds) {
        os << "\n[frontier.add]\n";
        os << "weight = " << fmt_double(a.weight) << "\n";
        os << "attainable = " << fmt_double(a.attainable) << "\n";
    }
    return os.str();
}

} // namespace alignlab
