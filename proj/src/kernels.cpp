#include "inpr/kernels.hpp"

#include "inpr/error.hpp"

#include <cmath>
#include <sstream>

namespace inpr {

namespace {

// Bernoulli polynomials in w = u(1 - u), which makes B_{2k}(u) = B_{2k}(1 - u)
// hold bit-for-bit:
//   B2 = 1/6 - w,  B4 = w^2 - 1/30,  B6 = 1/42 - w^2/2 - w^3.
// Each returns 1 + (-1)^(order-1) B_{2 order}(u) / (2 order)!.
inline double sobolev_factor(double s, double t, int order) noexcept {
    const double u = std::fabs(s - t);
    const double w = u * (1.0 - u);
    switch (order) {
        case 1:
            return 1.0 + (1.0 / 6.0 - w) / 2.0;
        case 2:
            return 1.0 - (w * w - 1.0 / 30.0) / 24.0;
        default:
            return 1.0 + (1.0 / 42.0 - 0.5 * w * w - w * w * w) / 720.0;
    }
}

void check_order(int order) {
    if (order < 1 || order > 3)
        throw ConfigError("periodic Sobolev order must be 1, 2 or 3, got " + std::to_string(order));
}

void check_unit(double v) {
    if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream os;
        os << "periodic Sobolev kernel input " << v << " outside [0,1]";
        throw DomainError(os.str());
    }
}

}  // namespace

KernelSpec KernelSpec::periodic_sobolev(int order, int dim) {
    check_order(order);
    if (dim < 1) throw ConfigError("kernel dimension must be >= 1");
    return KernelSpec(PeriodicSobolev{order, dim});
}

KernelSpec KernelSpec::exponential(double scale, double exponent, int dim) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("exponential kernel scale must be > 0");
    if (!(exponent > 0.0 && exponent <= 2.0)) throw ConfigError("exponential kernel exponent must lie in (0, 2]");
    if (dim < 1) throw ConfigError("kernel dimension must be >= 1");
    return KernelSpec(Exponential{scale, exponent, dim});
}

int KernelSpec::dim() const noexcept {
    return std::visit([](const auto& k) { return k.dim; }, variant_);
}

void KernelSpec::check_point(Point p) const {
    if (static_cast<int>(p.size()) != dim())
        throw ShapeError("point has dimension " + std::to_string(p.size()) + ", kernel expects " +
                         std::to_string(dim()));
    if (is_periodic_sobolev()) {
        for (double v : p) check_unit(v);
    } else {
        for (double v : p)
            if (!std::isfinite(v)) throw DomainError("exponential kernel input is not finite");
    }
}

void KernelSpec::check_points(const PointMatrix& points) const {
    if (points.cols() != dim())
        throw ShapeError("points have dimension " + std::to_string(points.cols()) + ", kernel expects " +
                         std::to_string(dim()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) check_point(row_of(points, i));
}

double KernelSpec::evaluate_unchecked(const double* a, const double* b) const noexcept {
    if (const auto* ps = std::get_if<PeriodicSobolev>(&variant_)) {
        double prod = 1.0;
        for (int j = 0; j < ps->dim; ++j) prod *= sobolev_factor(a[j], b[j], ps->order);
        return prod;
    }
    const auto& ex = std::get<Exponential>(variant_);
    double sq = 0.0;
    for (int j = 0; j < ex.dim; ++j) {
        const double d = a[j] - b[j];
        sq += d * d;
    }
    if (sq == 0.0) return 1.0;
    const double r = std::sqrt(sq) / ex.scale;
    return std::exp(-std::pow(r, ex.exponent));
}

double KernelSpec::operator()(Point a, Point b) const {
    check_point(a);
    check_point(b);
    return evaluate_unchecked(a.data(), b.data());
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    if (const auto* ps = std::get_if<PeriodicSobolev>(&variant_)) {
        os << "sobolev" << ps->order << "(d=" << ps->dim << ")";
    } else {
        const auto& ex = std::get<Exponential>(variant_);
        os << "exp(scale=" << ex.scale << ",exponent=" << ex.exponent << ",d=" << ex.dim << ")";
    }
    return os.str();
}

bool operator==(const KernelSpec& a, const KernelSpec& b) {
    if (a.variant_.index() != b.variant_.index()) return false;
    if (const auto* pa = std::get_if<PeriodicSobolev>(&a.variant_)) {
        const auto& pb = std::get<PeriodicSobolev>(b.variant_);
        return pa->order == pb.order && pa->dim == pb.dim;
    }
    const auto& ea = std::get<Exponential>(a.variant_);
    const auto& eb = std::get<Exponential>(b.variant_);
    return ea.scale == eb.scale && ea.exponent == eb.exponent && ea.dim == eb.dim;
}

double periodic_sobolev_1d(double s, double t, int order) {
    check_order(order);
    check_unit(s);
    check_unit(t);
    return sobolev_factor(s, t, order);
}

double tensor_kernel(Point x, Point x2, const KernelSpec& spec) {
    if (!spec.is_periodic_sobolev()) throw ConfigError("tensor_kernel requires a periodic Sobolev spec");
    return spec(x, x2);
}

double exponential_kernel(Point x, Point x2, const KernelSpec& spec) {
    if (spec.is_periodic_sobolev()) throw ConfigError("exponential_kernel requires an exponential spec");
    return spec(x, x2);
}

GramMatrix gram_matrix(const PointMatrix& points, const KernelSpec& spec) {
    if (points.rows() == 0) throw InputError("gram_matrix: empty point list");
    spec.check_points(points);
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    Matrix k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double* pj = points.data() + j * d;
        for (Eigen::Index i = j; i < n; ++i) {
            const double v = spec.evaluate_unchecked(points.data() + i * d, pj);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return GramMatrix(std::move(k));
}

Matrix cross_kernel(const PointMatrix& rows, const PointMatrix& cols, const KernelSpec& spec) {
    spec.check_points(rows);
    spec.check_points(cols);
    const Eigen::Index d = rows.cols();
    Matrix out(rows.rows(), cols.rows());
    for (Eigen::Index j = 0; j < cols.rows(); ++j) {
        const double* pj = cols.data() + j * d;
        for (Eigen::Index i = 0; i < rows.rows(); ++i)
            out(i, j) = spec.evaluate_unchecked(rows.data() + i * d, pj);
    }
    return out;
}

}  // namespace inpr
