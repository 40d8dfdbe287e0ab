#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>

#include "unb/assign.hpp"
#include "unb/config.hpp"
#include "unb/harness.hpp"
#include "unb/training.hpp"

namespace py = pybind11;
using namespace unb;

namespace {

SimConfig config_from(const py::kwargs& overrides) {
    SimConfig config;
    for (const auto& [key, value] : overrides) {
        const auto name = py::cast<std::string>(key);
        std::string text;
        if (py::isinstance<py::bool_>(value)) {
            text = py::cast<bool>(value) ? "true" : "false";
        } else {
            text = py::cast<std::string>(py::str(value));
        }
        set_config_value(config, name, text);
    }
    config.validate();
    return config;
}

std::uint64_t seed_or_default(const std::optional<std::uint64_t>& seed, const SimConfig& config) {
    return seed ? *seed : config.master_seed;
}

py::dict result_dict(const ExperimentResult& r) {
    py::dict d;
    d["realization"] = r.realization;
    d["strategy"] = strategy_name(r.strategy);
    d["pdp"] = r.pdp;
    d["transmission_rate"] = r.transmission_rate;
    d["error_rate"] = r.error_rate;
    d["assignment"] = format_assignment(r.assignment);
    d["wall_time"] = r.wall_time;
    return d;
}

py::dict summary_dict(const StrategySummary& s) {
    py::dict d;
    d["strategy"] = strategy_name(s.strategy);
    d["realizations"] = s.realizations;
    d["mean_error_rate"] = s.mean_error_rate;
    d["stderr_error_rate"] = s.stderr_error_rate;
    d["mean_pdp"] = s.mean_pdp;
    d["mean_transmission_rate"] = s.mean_transmission_rate;
    return d;
}

py::dict run_dict(const MonteCarloResult& mc) {
    py::list results, summary;
    for (const auto& r : mc.results) results.append(result_dict(r));
    for (const auto& s : mc.summary) summary.append(summary_dict(s));
    py::dict d;
    d["results"] = results;
    d["summary"] = summary;
    return d;
}

py::dict solve_dict(const SolveResult& r) {
    py::dict d;
    d["assignment"] = format_assignment(r.assignment);
    d["bands"] = r.assignment.bands();
    d["value"] = r.value;
    d["visited"] = r.visited;
    return d;
}

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Monte Carlo band assignment for multiband UNB networks";

    m.def("strategies", [] {
        std::vector<std::string> names;
        for (auto s : kStrategies) names.emplace_back(strategy_name(s));
        return names;
    });

    m.def("config_keys", &config_keys);

    m.def(
        "default_config",
        [](const py::kwargs& overrides) {
            const auto config = config_from(overrides);
            std::map<std::string, std::string> out;
            for (const auto& key : config_keys()) out[key] = get_config_value(config, key);
            return out;
        },
        "Config as key -> text value, after applying overrides and validating.");

    m.def(
        "simulate",
        [](std::size_t realizations, std::optional<std::uint64_t> seed, unsigned threads,
           const py::kwargs& overrides) {
            const auto config = config_from(overrides);
            MonteCarloResult mc;
            {
                py::gil_scoped_release release;
                mc = run_monte_carlo(config, realizations, seed_or_default(seed, config),
                                     RunOptions{threads, false});
            }
            return run_dict(mc);
        },
        py::arg("realizations"), py::arg("seed") = py::none(), py::arg("threads") = 1u,
        "Monte Carlo batch; returns {'results': [...], 'summary': [...]}.");

    m.def(
        "sweep",
        [](const std::string& parameter, const std::vector<double>& values, std::size_t realizations,
           std::optional<std::uint64_t> seed, unsigned threads, const py::kwargs& overrides) {
            const auto config = config_from(overrides);
            const auto param = parse_sweep_parameter(parameter);
            SweepResult sw;
            {
                py::gil_scoped_release release;
                sw = unb::sweep(config, param, values, realizations, seed_or_default(seed, config),
                                RunOptions{threads, false});
            }
            py::list runs;
            for (const auto& run : sw.runs) runs.append(run_dict(run));
            py::dict d;
            d["parameter"] = sweep_parameter_name(sw.parameter);
            d["values"] = sw.values;
            d["runs"] = runs;
            return d;
        },
        py::arg("parameter"), py::arg("values"), py::arg("realizations"), py::arg("seed") = py::none(),
        py::arg("threads") = 1u);

    m.def(
        "train",
        [](std::optional<std::uint64_t> seed, bool low_overhead, const py::kwargs& overrides) {
            const auto config = config_from(overrides);
            const auto st = realization_training_stats(
                config, realization_seed(seed_or_default(seed, config), 0), low_overhead);
            const auto B = static_cast<py::ssize_t>(st.num_bs);
            const auto M = static_cast<py::ssize_t>(st.num_bands);
            Array S({B, M});
            Array R({B, B, M});
            auto s = S.mutable_unchecked<2>();
            auto r = R.mutable_unchecked<3>();
            for (int b = 0; b < st.num_bs; ++b) {
                for (int band = 0; band < st.num_bands; ++band) {
                    s(b, band) = st.S(b, band);
                    for (int k = 0; k < st.num_bs; ++k) r(b, k, band) = st.R(b, k, band);
                }
            }
            py::dict d;
            d["S"] = S;
            d["R"] = R;
            d["flagged_cells"] = st.flagged_cells();
            return d;
        },
        py::arg("seed") = py::none(), py::arg("low_overhead") = false,
        "Training statistics of realization 0: S[b, m] and R[b, k, m].");

    m.def(
        "solve_p3",
        [](Array S, Array R, std::uint64_t enumeration_cap, int restarts, std::uint64_t seed) {
            if (S.ndim() != 2 || R.ndim() != 3) throw std::invalid_argument("S must be (B, M), R (B, B, M)");
            const int B = static_cast<int>(S.shape(0));
            const int M = static_cast<int>(S.shape(1));
            if (R.shape(0) != B || R.shape(1) != B || R.shape(2) != M) {
                throw std::invalid_argument("R shape does not match S");
            }
            DecodeStats st;
            st.num_bs = B;
            st.num_bands = M;
            st.s.value.resize(static_cast<std::size_t>(B * M));
            st.s.count.assign(st.s.value.size(), 1);
            st.r.value.resize(static_cast<std::size_t>(B * B * M));
            st.r.count.assign(st.r.value.size(), 1);
            auto s = S.unchecked<2>();
            auto r = R.unchecked<3>();
            for (int b = 0; b < B; ++b) {
                for (int band = 0; band < M; ++band) {
                    st.s.value[st.s_index(b, band)] = s(b, band);
                    for (int k = 0; k < B; ++k) st.r.value[st.r_index(b, k, band)] = r(b, k, band);
                }
            }
            Rng rng = make_rng(seed, {0x501Eu});
            return solve_dict(solve(build_p3_objective(st), enumeration_cap, restarts, rng));
        },
        py::arg("S"), py::arg("R"), py::arg("enumeration_cap") = SimConfig{}.enumeration_cap,
        py::arg("restarts") = SimConfig{}.local_search_restarts, py::arg("seed") = 0,
        "Maximize sum of S minus co-band R.");

    m.def(
        "solve_p4",
        [](Array locations, double eta, int num_bands, std::uint64_t enumeration_cap, int restarts,
           std::uint64_t seed) {
            if (locations.ndim() != 2 || locations.shape(1) != 2) {
                throw std::invalid_argument("locations must be (B, 2)");
            }
            auto a = locations.unchecked<2>();
            std::vector<Point2D> pts;
            for (py::ssize_t i = 0; i < a.shape(0); ++i) pts.push_back({a(i, 0), a(i, 1)});
            Rng rng = make_rng(seed, {0x501Eu});
            return solve_dict(solve(build_p4_objective(pts, eta, num_bands), enumeration_cap, restarts, rng));
        },
        py::arg("locations"), py::arg("eta") = SimConfig{}.eta, py::arg("num_bands") = SimConfig{}.num_bands,
        py::arg("enumeration_cap") = SimConfig{}.enumeration_cap,
        py::arg("restarts") = SimConfig{}.local_search_restarts, py::arg("seed") = 0,
        "Minimize the sum of d^-eta over co-band BS pairs.");

    m.def(
        "oracle",
        [](std::size_t realization, std::optional<std::uint64_t> seed, const py::kwargs& overrides) {
            const auto config = config_from(overrides);
            const auto rows =
                run_realization(config, realization_seed(seed_or_default(seed, config), realization), realization);
            py::dict d;
            for (const auto& r : rows) {
                if (r.strategy == Strategy::oracle_packet || r.strategy == Strategy::oracle_trans) {
                    d[strategy_name(r.strategy)] = result_dict(r);
                }
            }
            return d;
        },
        py::arg("realization") = 0, py::arg("seed") = py::none(),
        "Oracle assignments of one realization.");
}
