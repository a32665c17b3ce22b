#include "delspec/catalog.hpp"

#include "delspec/errors.hpp"

namespace delspec {

std::vector<std::string> catalog_names() {
    return {"hayes", "ode", "re-basic", "delayed-mathieu"};
}

std::string catalog_document(const std::string& name) {
    if (name == "hayes") {
        // x'(t) = -(pi/2) x(t-1); characteristic roots +-i pi/2, multipliers +-i at h=1
        return R"json({
  "problem": {"kind": "rfde", "dim": 1, "max_delay": 1,
              "discrete": [{"delay": 1, "B": [["-(pi/2)"]]}]},
  "disc": {"M": 21, "N": 20, "h": 1, "s": 0, "method": "collocation"},
  "run": {"n_list": [5, 10, 15, 20, 25],
          "reference": {"kind": "char-roots", "re_min": -1, "re_max": 1, "im_min": 0, "im_max": 2}}
})json";
    }
    if (name == "ode") {
        // x'(t) = -x(t); flow multiplier e^{-1} at h=1
        return R"json({
  "problem": {"kind": "rfde", "dim": 1, "max_delay": 1, "A": [["-1"]]},
  "disc": {"M": 11, "N": 10, "h": 1, "s": 0, "method": "collocation"},
  "run": {"n_list": [3, 5, 7, 10, 14, 20],
          "reference": {"kind": "value", "re": 0.36787944117144233, "im": 0}}
})json";
    }
    if (name == "re-basic") {
        // x(t) = int_{-3}^{-1} (1/2) x(t+theta) dtheta; root 0, multiplier 1
        return R"json({
  "problem": {"kind": "re", "dim": 1, "max_delay": 3,
              "kernels": [{"support": [-3, -1], "C": [["0.5"]]}]},
  "disc": {"M": 21, "N": 20, "h": 3, "s": 0, "method": "collocation"},
  "run": {"n_list": [5, 10, 15, 20, 25],
          "reference": {"kind": "value", "re": 1, "im": 0}}
})json";
    }
    if (name == "delayed-mathieu") {
        // x'(t) = (-0.5 + 0.5 cos(2 pi t)) x(t) - x(t-1), period 1
        return R"json({
  "problem": {"kind": "rfde", "dim": 1, "max_delay": 1,
              "A": [["-0.5 + 0.5*cos(2*pi*t)"]],
              "discrete": [{"delay": 1, "B": [["-1"]]}],
              "period": 1},
  "disc": {"M": 25, "N": 24, "h": 1, "s": 0, "method": "collocation"},
  "run": {"n_list": [6, 10, 14, 18, 24],
          "reference": {"kind": "bruteforce", "steps": 4096, "M": 24}}
})json";
    }
    throw ConfigError("unknown built-in problem '" + name +
                      "' (available: hayes, ode, re-basic, delayed-mathieu)");
}

}  // namespace delspec
