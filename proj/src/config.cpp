#include "delspec/config.hpp"

#include <json.hpp>

namespace delspec {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config error at " + path + ": " + what);
}

void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) { ok = true; break; }
        if (!ok) fail(path + "." + item.key(), "unknown key");
    }
}

const json& require(const json& j, const std::string& path, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required key");
    return *it;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

ScalarFunc parse_entry(const json& j, const std::string& path, bool allow_theta) {
    if (j.is_number()) return ScalarFunc(j.get<double>());
    if (j.is_string()) {
        try {
            return ScalarFunc::parse(j.get<std::string>(), allow_theta);
        } catch (const ConfigError& e) {
            fail(path, e.what());
        }
    }
    fail(path, "expected an expression string or a number");
}

CoeffMatrix parse_coeff_matrix(const json& j, const std::string& path, int dim,
                               bool allow_theta) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim)
        fail(path, "expected " + std::to_string(dim) + " rows");
    CoeffMatrix m = CoeffMatrix::zero(dim);
    for (int r = 0; r < dim; ++r) {
        const json& row = j[r];
        const std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            fail(rp, "expected " + std::to_string(dim) + " entries");
        for (int c = 0; c < dim; ++c)
            m.at(r, c) = parse_entry(row[c], rp + "[" + std::to_string(c) + "]", allow_theta);
    }
    return m;
}

ProblemSpec parse_problem(const json& j, const std::string& path) {
    check_keys(j, path, {"kind", "dim", "max_delay", "A", "discrete", "kernels", "period"});
    ProblemSpec p;
    const std::string kind = require(j, path, "kind").get<std::string>();
    if (kind == "rfde") p.kind = ProblemSpec::Kind::RFDE;
    else if (kind == "re") p.kind = ProblemSpec::Kind::RE;
    else fail(path + ".kind", "expected \"rfde\" or \"re\"");
    p.dim = get_int(require(j, path, "dim"), path + ".dim");
    if (p.dim < 1) fail(path + ".dim", "must be positive");
    p.max_delay = get_number(require(j, path, "max_delay"), path + ".max_delay");
    if (j.contains("A"))
        p.A = parse_coeff_matrix(j["A"], path + ".A", p.dim, /*allow_theta=*/false);
    if (j.contains("discrete")) {
        const json& arr = j["discrete"];
        if (!arr.is_array()) fail(path + ".discrete", "expected an array");
        for (size_t i = 0; i < arr.size(); ++i) {
            const std::string ip = path + ".discrete[" + std::to_string(i) + "]";
            check_keys(arr[i], ip, {"delay", "B"});
            DiscreteTerm term;
            term.delay = get_number(require(arr[i], ip, "delay"), ip + ".delay");
            term.B = parse_coeff_matrix(require(arr[i], ip, "B"), ip + ".B", p.dim,
                                        /*allow_theta=*/false);
            p.discrete.push_back(std::move(term));
        }
    }
    if (j.contains("kernels")) {
        const json& arr = j["kernels"];
        if (!arr.is_array()) fail(path + ".kernels", "expected an array");
        for (size_t i = 0; i < arr.size(); ++i) {
            const std::string ip = path + ".kernels[" + std::to_string(i) + "]";
            check_keys(arr[i], ip, {"support", "C"});
            const json& sup = require(arr[i], ip, "support");
            if (!sup.is_array() || sup.size() != 2) fail(ip + ".support", "expected [lo, hi]");
            KernelMatrix k;
            k.dim = p.dim;
            k.support_lo = get_number(sup[0], ip + ".support[0]");
            k.support_hi = get_number(sup[1], ip + ".support[1]");
            const CoeffMatrix cm = parse_coeff_matrix(require(arr[i], ip, "C"), ip + ".C",
                                                      p.dim, /*allow_theta=*/true);
            k.entries = cm.entries;
            p.kernels.push_back(std::move(k));
        }
    }
    if (j.contains("period"))
        p.period = get_number(j["period"], path + ".period");
    return p;
}

DiscConfig parse_disc(const json& j, const std::string& path) {
    check_keys(j, path, {"M", "N", "h", "s", "method", "pieces", "quad_order"});
    DiscConfig cfg;
    cfg.M = get_int(require(j, path, "M"), path + ".M");
    cfg.N = get_int(require(j, path, "N"), path + ".N");
    cfg.h = get_number(require(j, path, "h"), path + ".h");
    if (j.contains("s")) cfg.s = get_number(j["s"], path + ".s");
    if (j.contains("method")) {
        const std::string m = j["method"].get<std::string>();
        if (m == "collocation") cfg.method = Method::Collocation;
        else if (m == "weighted-residuals") cfg.method = Method::WeightedResiduals;
        else if (m == "piecewise") cfg.method = Method::PiecewiseCollocation;
        else fail(path + ".method",
                  "expected \"collocation\", \"weighted-residuals\" or \"piecewise\"");
    }
    if (j.contains("pieces")) {
        const json& arr = j["pieces"];
        if (!arr.is_array()) fail(path + ".pieces", "expected an array of breakpoints");
        for (size_t i = 0; i < arr.size(); ++i)
            cfg.pieces.push_back(get_number(arr[i], path + ".pieces[" + std::to_string(i) + "]"));
    }
    if (j.contains("quad_order"))
        cfg.quad_order = get_int(j["quad_order"], path + ".quad_order");
    return cfg;
}

ReferenceSpec parse_reference(const json& j, const std::string& path) {
    ReferenceSpec ref;
    const std::string kind = require(j, path, "kind").get<std::string>();
    if (kind == "value") {
        check_keys(j, path, {"kind", "re", "im"});
        ref.kind = ReferenceSpec::Kind::Value;
        const double re = get_number(require(j, path, "re"), path + ".re");
        const double im = j.contains("im") ? get_number(j["im"], path + ".im") : 0.0;
        ref.value = {re, im};
    } else if (kind == "char-roots") {
        check_keys(j, path, {"kind", "re_min", "re_max", "im_min", "im_max", "n_re", "n_im"});
        ref.kind = ReferenceSpec::Kind::CharRoots;
        if (j.contains("re_min")) ref.region.re_min = get_number(j["re_min"], path + ".re_min");
        if (j.contains("re_max")) ref.region.re_max = get_number(j["re_max"], path + ".re_max");
        if (j.contains("im_min")) ref.region.im_min = get_number(j["im_min"], path + ".im_min");
        if (j.contains("im_max")) ref.region.im_max = get_number(j["im_max"], path + ".im_max");
        if (j.contains("n_re")) ref.region.n_re = get_int(j["n_re"], path + ".n_re");
        if (j.contains("n_im")) ref.region.n_im = get_int(j["n_im"], path + ".n_im");
    } else if (kind == "bruteforce") {
        check_keys(j, path, {"kind", "steps", "M"});
        ref.kind = ReferenceSpec::Kind::Bruteforce;
        if (j.contains("steps")) ref.steps = get_int(j["steps"], path + ".steps");
        if (j.contains("M")) ref.bruteforce_M = get_int(j["M"], path + ".M");
    } else {
        fail(path + ".kind", "expected \"value\", \"char-roots\" or \"bruteforce\"");
    }
    return ref;
}

}  // namespace

RunSpec parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, "$", {"problem", "disc", "run"});
    RunSpec spec;
    spec.problem = parse_problem(require(j, "$", "problem"), "problem");
    spec.disc = parse_disc(require(j, "$", "disc"), "disc");
    if (j.contains("run")) {
        const json& r = j["run"];
        check_keys(r, "run", {"n_list", "reference", "out"});
        if (r.contains("n_list")) {
            if (!r["n_list"].is_array()) fail("run.n_list", "expected an array");
            for (size_t i = 0; i < r["n_list"].size(); ++i)
                spec.run.n_list.push_back(
                    get_int(r["n_list"][i], "run.n_list[" + std::to_string(i) + "]"));
        }
        if (r.contains("reference"))
            spec.run.reference = parse_reference(r["reference"], "run.reference");
        if (r.contains("out")) spec.run.out = r["out"].get<std::string>();
    }
    spec.problem = validate(spec.problem, &spec.warnings);
    return spec;
}

namespace {

json coeff_to_json(const CoeffMatrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.dim; ++r) {
        json row = json::array();
        for (int c = 0; c < m.dim; ++c) row.push_back(m.at(r, c).source());
        rows.push_back(std::move(row));
    }
    return rows;
}

bool is_zero_matrix(const CoeffMatrix& m) {
    for (const auto& f : m.entries)
        if (!f.is_constant() || f.constant_value() != 0.0) return false;
    return true;
}

}  // namespace

std::string serialize(const RunSpec& spec) {
    json j;
    json& pj = j["problem"];
    pj["kind"] = spec.problem.kind == ProblemSpec::Kind::RFDE ? "rfde" : "re";
    pj["dim"] = spec.problem.dim;
    pj["max_delay"] = spec.problem.max_delay;
    if (!spec.problem.A.entries.empty() && !is_zero_matrix(spec.problem.A))
        pj["A"] = coeff_to_json(spec.problem.A);
    if (!spec.problem.discrete.empty()) {
        json arr = json::array();
        for (const auto& term : spec.problem.discrete) {
            json tj;
            tj["delay"] = term.delay;
            tj["B"] = coeff_to_json(term.B);
            arr.push_back(std::move(tj));
        }
        pj["discrete"] = std::move(arr);
    }
    if (!spec.problem.kernels.empty()) {
        json arr = json::array();
        for (const auto& k : spec.problem.kernels) {
            json kj;
            kj["support"] = json::array({k.support_lo, k.support_hi});
            json rows = json::array();
            for (int r = 0; r < k.dim; ++r) {
                json row = json::array();
                for (int c = 0; c < k.dim; ++c) row.push_back(k.at(r, c).source());
                rows.push_back(std::move(row));
            }
            kj["C"] = std::move(rows);
            arr.push_back(std::move(kj));
        }
        pj["kernels"] = std::move(arr);
    }
    if (spec.problem.period) pj["period"] = *spec.problem.period;

    json& dj = j["disc"];
    dj["M"] = spec.disc.M;
    dj["N"] = spec.disc.N;
    dj["h"] = spec.disc.h;
    dj["s"] = spec.disc.s;
    dj["method"] = spec.disc.method == Method::Collocation ? "collocation"
                   : spec.disc.method == Method::WeightedResiduals ? "weighted-residuals"
                                                                   : "piecewise";
    if (!spec.disc.pieces.empty()) dj["pieces"] = spec.disc.pieces;
    if (spec.disc.quad_order > 0) dj["quad_order"] = spec.disc.quad_order;

    json rj = json::object();
    if (!spec.run.n_list.empty()) rj["n_list"] = spec.run.n_list;
    if (spec.run.reference) {
        const auto& ref = *spec.run.reference;
        json refj;
        switch (ref.kind) {
            case ReferenceSpec::Kind::Value:
                refj["kind"] = "value";
                refj["re"] = ref.value.real();
                refj["im"] = ref.value.imag();
                break;
            case ReferenceSpec::Kind::CharRoots:
                refj["kind"] = "char-roots";
                refj["re_min"] = ref.region.re_min;
                refj["re_max"] = ref.region.re_max;
                refj["im_min"] = ref.region.im_min;
                refj["im_max"] = ref.region.im_max;
                refj["n_re"] = ref.region.n_re;
                refj["n_im"] = ref.region.n_im;
                break;
            case ReferenceSpec::Kind::Bruteforce:
                refj["kind"] = "bruteforce";
                refj["steps"] = ref.steps;
                if (ref.bruteforce_M > 0) refj["M"] = ref.bruteforce_M;
                break;
        }
        rj["reference"] = std::move(refj);
    }
    if (!spec.run.out.empty()) rj["out"] = spec.run.out;
    if (!rj.empty()) j["run"] = std::move(rj);
    return j.dump(2);
}

}  // namespace delspec
