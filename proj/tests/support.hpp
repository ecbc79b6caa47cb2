#pragma once

// Test-side oracles and fixtures. Nothing here calls into the library's
// determinant, curvature or classification code.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "prodgeo/prodgeo.hpp"

namespace testing_support {

using prodgeo::EvalPoint;
using prodgeo::InnerFn;
using prodgeo::Jet2;
using prodgeo::Matrix;
using prodgeo::OuterFn;
using prodgeo::ProductionModel;

/// Determinant by the Leibniz permutation expansion. O(n! n); fine for n <= 6.
inline double leibniz_det(const Matrix& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0.0;
    do {
        // sign by counting inversions
        int inv = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) inv += perm[i] > perm[j];
        double term = inv % 2 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) term *= m(i, perm[i]);
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

/// Sum of |terms| of the Leibniz expansion: the natural roundoff scale of det.
inline double leibniz_abs_sum(const Matrix& m) {
    const std::size_t n = m.rows();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double total = 0.0;
    do {
        double term = 1.0;
        for (std::size_t i = 0; i < n; ++i) term *= std::abs(m(i, perm[i]));
        total += term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

inline double rel_diff(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

/// Worst |a_i - b_i| / max(|b|_inf, tiny) over a vector.
inline double vec_rel(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0, worst = 0.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_diff(a[i], b[i], scale));
    return worst;
}

inline double mat_rel(const Matrix& a, const Matrix& b) {
    const double scale = b.max_abs();
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) worst = std::max(worst, rel_diff(a(i, j), b(i, j), scale));
    return worst;
}

inline EvalPoint ones(std::size_t n) { return EvalPoint(std::vector<double>(n, 1.0)); }

/// Independent RNG for test-side random instances.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double signed_k() {
        const double mag = uniform(0.25, 2.0);
        return std::bernoulli_distribution(0.5)(rng_) ? mag : -mag;
    }
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    InnerFn inner() {
        switch (pick(3)) {
        case 0: return InnerFn::linear(uniform(0.25, 2.0), uniform(-1.0, 1.0));
        case 1: {
            // power with exponent away from zero, either sign
            return InnerFn::power(uniform(0.5, 2.0), signed_k());
        }
        default: return InnerFn::log(uniform(0.25, 2.0), uniform(-1.0, 1.0));
        }
    }

    OuterFn outer() {
        switch (pick(3)) {
        case 0: return OuterFn::identity();
        case 1: return OuterFn::affine(uniform(0.5, 3.0), uniform(-1.0, 1.0));
        default: return OuterFn::exp_affine(uniform(0.5, 2.0), uniform(0.1, 0.5), uniform(-1.0, 1.0));
        }
    }

private:
    std::mt19937_64 rng_;
};

/// Models that belong to none of the closed-form families (or, for the
/// unequal Cobb-Douglas entries, only to Eq2).
struct Counterexample {
    std::string name;
    ProductionModel model;
    bool eq2_allowed = false;
};

inline std::vector<Counterexample> counterexample_library() {
    std::vector<Counterexample> lib;
    lib.push_back({"cd_0.3_0.7", prodgeo::make_cobb_douglas(1.0, {0.3, 0.7}), true});
    lib.push_back({"cd_0.5_0.6_0.2", prodgeo::make_cobb_douglas(2.0, {0.5, 0.6, 0.2}), true});
    lib.push_back({"ces_rho_0.5", prodgeo::make_opaque(2, [](auto x) {
                       using std::pow;
                       using prodgeo::pow;
                       return pow(pow(x[0], 0.5) + pow(x[1], 0.5), 2.0);
                   }, "ces(0.5)")});
    lib.push_back({"ces_rho_-1_n3", prodgeo::make_opaque(3, [](auto x) {
                       using std::pow;
                       using prodgeo::pow;
                       return pow(pow(x[0], -1.0) + pow(x[1], -1.0) + pow(x[2], -1.0), -1.0);
                   }, "ces(-1)")});
    lib.push_back({"sum", prodgeo::make_opaque(2, [](auto x) { return x[0] + x[1]; }, "x1+x2")});
    lib.push_back({"affine", prodgeo::make_opaque(2, [](auto x) { return 2.0 * x[0] + 3.0 * x[1] + 1.0; }, "2x1+3x2+1")});
    // Eq7-like, but the elasticity of x1 varies with x1
    lib.push_back({"varying_k", prodgeo::make_opaque(2, [](auto x) {
                       using std::exp;
                       using std::log;
                       using prodgeo::exp;
                       using prodgeo::log;
                       const auto l = log(x[0]);
                       return exp((1.0 + 0.1 * l) * l + x[1]);
                   }, "x1^(1+0.1 ln x1) e^x2")});
    // constant elasticity in x1, but the remaining factors do not separate
    lib.push_back({"nonseparable_rest", prodgeo::make_opaque(3, [](auto x) {
                       using std::exp;
                       using prodgeo::exp;
                       return x[0] * x[0] * exp(x[1] * x[2]);
                   }, "x1^2 e^(x2 x3)")});
    // (x1 + 1)(x2 + 1) - 1: a quasi-sum, but no elasticity is constant and
    // the MRS is not proportional
    lib.push_back({"bilinear_plus",
                   prodgeo::make_opaque(2, [](auto x) { return x[0] * x[1] + x[0] + x[1]; }, "x1 x2 + x1 + x2")});
    lib.push_back({"translog", prodgeo::make_opaque(2, [](auto x) {
                       using std::exp;
                       using std::log;
                       using prodgeo::exp;
                       using prodgeo::log;
                       const auto a = log(x[0]);
                       const auto b = log(x[1]);
                       return exp(0.3 * a + 0.7 * b + 0.1 * a * b);
                   }, "translog")});
    return lib;
}

// ---------------------------------------------------------------------------
// Subprocess harness for the CLI

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

inline std::string shell_quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs the CLI with `args`; `env` is prepended verbatim (e.g. "PRODGEO_SEED=3").
inline RunResult run_cli(const std::vector<std::string>& args, const std::string& env = "") {
    static int counter = 0;
    const auto err_path = std::filesystem::temp_directory_path() /
                          ("prodgeo_test_err_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::string cmd = env.empty() ? std::string() : env + " ";
    cmd += shell_quote(PRODGEO_CLI_PATH);
    for (const auto& a : args) cmd += " " + shell_quote(a);
    cmd += " 2>" + shell_quote(err_path.string());

    RunResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int raw = ::pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.err = read_file(err_path);
    std::filesystem::remove(err_path);
    return r;
}

inline std::string model_path(const std::string& name) {
    return std::string(PRODGEO_SOURCE_DIR) + "/tools/models/" + name;
}

inline std::string golden_path(const std::string& name) {
    return std::string(PRODGEO_SOURCE_DIR) + "/tests/golden/" + name;
}

/// One golden case: the file under tests/golden and the CLI arguments that
/// must reproduce it byte for byte.
struct GoldenCase {
    std::string file;
    std::vector<std::string> args;
};

inline std::vector<GoldenCase> golden_cases() {
    return {
        {"analyze_cd_sqrt.json", {"analyze", "--fn", model_path("cd_sqrt.json"), "--point", "1,1", "--no-timestamp"}},
        {"analyze_cd_sqrt.csv",
         {"analyze", "--fn", model_path("cd_sqrt.json"), "--point", "1,1", "--format", "csv"}},
        {"analyze_eq7_n2.json", {"analyze", "--fn", model_path("eq7_n2.json"), "--point", "1.5,0.75", "--no-timestamp"}},
        {"classify_eq9_n3.json", {"classify", "--fn", model_path("eq9_n3.json"), "--seed", "0", "--no-timestamp"}},
        {"classify_cd_unequal.json",
         {"classify", "--fn", model_path("cd_unequal.json"), "--seed", "0", "--no-timestamp"}},
        {"classify_eq8_n2.csv",
         {"classify", "--fn", model_path("eq8_n2.json"), "--seed", "5", "--samples", "16", "--format", "csv",
          "--no-timestamp"}},
        {"verify_iv2_n3.json",
         {"verify-theorem", "--part", "iv2", "--n", "3", "--trials", "20", "--seed", "0", "--no-timestamp"}},
        {"verify_iv1_n2.json",
         {"verify-theorem", "--part", "iv1", "--n", "2", "--trials", "20", "--seed", "0", "--no-timestamp"}},
        {"sweep_cd_sqrt.csv", {"sweep", "--fn", model_path("cd_sqrt.json"), "--box", "1:2", "--steps", "3"}},
        {"sweep_eq10_n3.csv", {"sweep", "--fn", model_path("eq10_n3.json"), "--box", "0.5:2", "--steps", "3"}},
    };
}

}  // namespace testing_support
