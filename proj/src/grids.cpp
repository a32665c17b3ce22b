#include "delspec/grids.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace delspec {

namespace {

void check_interval(const char* who, double a, double b) {
    if (!(a < b))
        throw ConfigError(std::string(who) + ": invalid interval, requires a < b (a=" +
                          std::to_string(a) + ", b=" + std::to_string(b) + ")");
}

}  // namespace

NodeSet chebyshev_zeros(int N, double a, double b) {
    check_interval("chebyshev_zeros", a, b);
    if (N < 0) throw ConfigError("chebyshev_zeros: count index N must be nonnegative");
    NodeSet ns;
    ns.a = a;
    ns.b = b;
    ns.family = NodeFamily::ChebyshevZeros;
    ns.nodes.resize(N + 1);
    ns.weights.resize(N + 1);
    const double half = 0.5 * (b - a);
    for (int n = 0; n <= N; ++n) {
        const double phi = (2.0 * n + 1.0) * M_PI / (2.0 * (N + 1));
        ns.nodes[n] = a + half * (1.0 - std::cos(phi));
        ns.weights[n] = ((n % 2) ? -1.0 : 1.0) * std::sin(phi);
    }
    return ns;
}

NodeSet chebyshev_extrema(int M, double a, double b) {
    check_interval("chebyshev_extrema", a, b);
    if (M < 1) throw ConfigError("chebyshev_extrema: count index M must be positive");
    NodeSet ns;
    ns.a = a;
    ns.b = b;
    ns.family = NodeFamily::ChebyshevExtrema;
    ns.nodes.resize(M + 1);
    ns.weights.resize(M + 1);
    const double half = 0.5 * (b - a);
    for (int m = 0; m <= M; ++m) {
        ns.nodes[m] = a + half * (1.0 - std::cos(m * M_PI / M));
        ns.weights[m] = ((m % 2) ? -1.0 : 1.0) * ((m == 0 || m == M) ? 0.5 : 1.0);
    }
    ns.nodes.front() = a;  // endpoints exact
    ns.nodes.back() = b;
    return ns;
}

NodeSet custom_nodes(std::vector<double> nodes, double a, double b) {
    check_interval("custom_nodes", a, b);
    if (nodes.empty()) throw ConfigError("custom_nodes: at least one node required");
    for (size_t j = 0; j + 1 < nodes.size(); ++j)
        if (!(nodes[j] < nodes[j + 1]))
            throw ConfigError("custom_nodes: nodes must be strictly ascending");
    if (nodes.front() < a || nodes.back() > b)
        throw ConfigError("custom_nodes: nodes must lie inside [a, b]");
    NodeSet ns;
    ns.a = a;
    ns.b = b;
    ns.family = NodeFamily::Custom;
    ns.nodes = std::move(nodes);
    const int n = ns.count();
    ns.weights.assign(n, 1.0);
    // Scale differences by 4/(b-a) to keep the products in range.
    const double scale = 4.0 / (b - a);
    for (int j = 0; j < n; ++j) {
        double w = 1.0;
        for (int k = 0; k < n; ++k)
            if (k != j) w *= scale * (ns.nodes[j] - ns.nodes[k]);
        ns.weights[j] = 1.0 / w;
    }
    double wmax = 0.0;
    for (double w : ns.weights) wmax = std::max(wmax, std::abs(w));
    for (double& w : ns.weights) w /= wmax;
    return ns;
}

Eigen::VectorXd cardinal_values(const NodeSet& ns, double x) {
    const int n = ns.count();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    const double tie = 1e-14 * (ns.b - ns.a);
    for (int j = 0; j < n; ++j) {
        if (std::abs(x - ns.nodes[j]) <= tie) {
            out[j] = 1.0;
            return out;
        }
    }
    double denom = 0.0;
    for (int j = 0; j < n; ++j) {
        const double term = ns.weights[j] / (x - ns.nodes[j]);
        out[j] = term;
        denom += term;
    }
    out /= denom;
    return out;
}

Eigen::VectorXd lagrange_eval(const NodeSet& ns, const Eigen::MatrixXd& values, double x) {
    if (values.cols() != ns.count())
        throw ConfigError("lagrange_eval: values must have one column per node");
    return values * cardinal_values(ns, x);
}

double lagrange_eval(const NodeSet& ns, const Eigen::VectorXd& values, double x) {
    if (values.size() != ns.count())
        throw ConfigError("lagrange_eval: values length must match node count");
    return values.dot(cardinal_values(ns, x));
}

namespace {

// Values at the K+1 ascending Chebyshev extrema of [a,b] -> coefficients of
// sum_k c_k T_k(u) for the degree-K interpolant (type-I cosine transform).
Eigen::VectorXd cheb_coeffs_from_extrema_values(const Eigen::VectorXd& vals) {
    const int K = static_cast<int>(vals.size()) - 1;
    if (K == 0) return vals;
    Eigen::VectorXd c(K + 1);
    for (int k = 0; k <= K; ++k) {
        double s = 0.0;
        for (int j = 0; j <= K; ++j) {
            // classical index j corresponds to u_j = cos(j pi / K) = ascending index K-j
            const double beta = (j == 0 || j == K) ? 0.5 : 1.0;
            s += beta * vals[K - j] * std::cos(k * j * M_PI / K);
        }
        c[k] = (2.0 / K) * ((k == 0 || k == K) ? 0.5 : 1.0) * s;
    }
    return c;
}

// Coefficients of x -> int_a^x p for p given by Chebyshev coefficients c on
// [a,b]; term-wise antiderivative, constant fixed so the value at a is zero.
Eigen::VectorXd cheb_antiderivative_coeffs(const Eigen::VectorXd& c, double a, double b) {
    const int K = static_cast<int>(c.size()) - 1;
    const double half = 0.5 * (b - a);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(K + 2);
    auto cc = [&](int k) { return (k >= 0 && k <= K) ? c[k] : 0.0; };
    for (int k = 1; k <= K + 1; ++k) {
        const double upper = (k == 1) ? 2.0 * cc(0) : cc(k - 1);
        out[k] = half * (upper - cc(k + 1)) / (2.0 * k);
    }
    double at_a = 0.0;  // T_k(-1) = (-1)^k
    for (int k = 1; k <= K + 1; ++k) at_a += ((k % 2) ? -1.0 : 1.0) * out[k];
    out[0] = -at_a;
    return out;
}

}  // namespace

Eigen::MatrixXd cardinal_antiderivative_coeffs(const NodeSet& ns) {
    const int n = ns.count();
    Eigen::MatrixXd out(n + 1, n);
    if (n == 1) {
        // single cardinal == 1; int_a^x 1 = (b-a)/2 (u+1)
        out(0, 0) = 0.5 * (ns.b - ns.a);
        out(1, 0) = 0.5 * (ns.b - ns.a);
        return out;
    }
    const NodeSet cgl = chebyshev_extrema(n - 1, ns.a, ns.b);
    Eigen::MatrixXd vals(n, n);  // vals(j, col) = l_col(cgl_j)
    for (int j = 0; j < n; ++j) vals.row(j) = cardinal_values(ns, cgl.nodes[j]).transpose();
    for (int col = 0; col < n; ++col) {
        const Eigen::VectorXd c = cheb_coeffs_from_extrema_values(vals.col(col));
        out.col(col) = cheb_antiderivative_coeffs(c, ns.a, ns.b);
    }
    return out;
}

Eigen::VectorXd cardinal_antiderivatives(const NodeSet& ns, const Eigen::MatrixXd& coeffs,
                                         double x) {
    const double u = 2.0 * (x - ns.a) / (ns.b - ns.a) - 1.0;
    const int rows = static_cast<int>(coeffs.rows());
    Eigen::VectorXd tvals(rows);
    tvals[0] = 1.0;
    if (rows > 1) tvals[1] = u;
    for (int k = 2; k < rows; ++k) tvals[k] = 2.0 * u * tvals[k - 1] - tvals[k - 2];
    return coeffs.transpose() * tvals;
}

Eigen::VectorXd cardinal_antiderivatives(const NodeSet& ns, double x) {
    return cardinal_antiderivatives(ns, cardinal_antiderivative_coeffs(ns), x);
}

Eigen::VectorXd legendre_orthonormal(int N, double a, double b, double x) {
    check_interval("legendre_orthonormal", a, b);
    if (N < 0) throw ConfigError("legendre_orthonormal: N must be nonnegative");
    const double u = 2.0 * (x - a) / (b - a) - 1.0;
    Eigen::VectorXd p(N + 1);
    double pm1 = 0.0, p0 = 1.0;
    for (int i = 0; i <= N; ++i) {
        p[i] = std::sqrt((2.0 * i + 1.0) / (b - a)) * p0;
        const double p1 = ((2.0 * i + 1.0) * u * p0 - i * pm1) / (i + 1.0);
        pm1 = p0;
        p0 = p1;
    }
    return p;
}

Eigen::VectorXd legendre_orthonormal_antiderivatives(int N, double a, double b, double x) {
    check_interval("legendre_orthonormal_antiderivatives", a, b);
    const double u = 2.0 * (x - a) / (b - a) - 1.0;
    const double half = 0.5 * (b - a);
    // P_0 .. P_{N+1} at u
    Eigen::VectorXd P(N + 2);
    P[0] = 1.0;
    if (N + 1 >= 1) P[1] = u;
    for (int i = 1; i <= N; ++i) P[i + 1] = ((2.0 * i + 1.0) * u * P[i] - i * P[i - 1]) / (i + 1.0);
    Eigen::VectorXd out(N + 1);
    out[0] = std::sqrt(1.0 / (b - a)) * half * (u + 1.0);
    for (int i = 1; i <= N; ++i) {
        // int_{-1}^{u} P_i = (P_{i+1} - P_{i-1}) / (2i+1)
        out[i] = std::sqrt((2.0 * i + 1.0) / (b - a)) * half * (P[i + 1] - P[i - 1]) / (2.0 * i + 1.0);
    }
    return out;
}

QuadRule clenshaw_curtis(int K, double a, double b) {
    check_interval("clenshaw_curtis", a, b);
    if (K < 2) throw ConfigError("clenshaw_curtis: K must be at least 2");
    const NodeSet cgl = chebyshev_extrema(K - 1, a, b);
    const Eigen::VectorXd w = cardinal_antiderivatives(cgl, b);
    QuadRule q;
    q.a = a;
    q.b = b;
    q.points = cgl.nodes;
    q.weights.assign(w.data(), w.data() + w.size());
    return q;
}

QuadRule gauss_legendre(int K, double a, double b) {
    check_interval("gauss_legendre", a, b);
    if (K < 1) throw ConfigError("gauss_legendre: K must be positive");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K, K);
    for (int k = 1; k < K; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = beta;
        J(k - 1, k) = beta;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    const double half = 0.5 * (b - a);
    QuadRule q;
    q.a = a;
    q.b = b;
    q.points.resize(K);
    q.weights.resize(K);
    for (int i = 0; i < K; ++i) {
        q.points[i] = a + half * (es.eigenvalues()[i] + 1.0);
        const double v0 = es.eigenvectors()(0, i);
        q.weights[i] = 2.0 * v0 * v0 * half;
    }
    return q;
}

double lebesgue_constant(const NodeSet& ns, int probe_density) {
    if (probe_density < 10) throw ConfigError("lebesgue_constant: probe_density must be >= 10");
    const int npts = probe_density * ns.count() + 1;
    double best = 0.0;
    for (int i = 0; i < npts; ++i) {
        const double x = ns.a + (ns.b - ns.a) * i / (npts - 1);
        best = std::max(best, cardinal_values(ns, x).cwiseAbs().sum());
    }
    return best;
}

}  // namespace delspec
