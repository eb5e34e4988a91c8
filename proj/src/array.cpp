#include "pinnosc/array.hpp"

#include <cmath>
#include <string>

namespace pinnosc {

std::size_t shape_size(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) {
        if (d < 0) throw DimensionError("negative dimension");
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

Array::Array(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_size(shape_) != data_.size())
        throw DimensionError("shape/data size mismatch: expected " +
                             std::to_string(shape_size(shape_)) + ", got " +
                             std::to_string(data_.size()));
}

Array::Array(std::vector<int> shape) : shape_(std::move(shape)) {
    data_.assign(shape_size(shape_), 0.0);
}

Array Array::full(std::vector<int> shape, double v) {
    Array a(std::move(shape));
    for (auto& x : a.data_) x = v;
    return a;
}

Array Array::identity(int n) {
    Array a({n, n});
    for (int i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
}

bool Array::all_finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Array matmul(const Array& a, const Array& b) {
    if (a.rank() != 2 || b.rank() != 2)
        throw DimensionError("matmul expects rank-2 arrays");
    if (a.dim(1) != b.dim(0))
        throw DimensionError("matmul inner dimensions differ: " + std::to_string(a.dim(1)) +
                             " vs " + std::to_string(b.dim(0)));
    const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
    Array c({m, n});
    for (int i = 0; i < m; ++i)
        for (int p = 0; p < k; ++p) {
            const double av = a(i, p);
            for (int j = 0; j < n; ++j) c(i, j) += av * b(p, j);
        }
    return c;
}

Array transpose(const Array& a) {
    if (a.rank() != 2) throw DimensionError("transpose expects rank-2 array");
    Array t({a.dim(1), a.dim(0)});
    for (int i = 0; i < a.dim(0); ++i)
        for (int j = 0; j < a.dim(1); ++j) t(j, i) = a(i, j);
    return t;
}

namespace {
void check_same(const Array& a, const Array& b, const char* op) {
    if (!a.same_shape(b)) throw DimensionError(std::string(op) + ": shape mismatch");
}
}  // namespace

Array add(const Array& a, const Array& b) {
    check_same(a, b, "add");
    Array c(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
    return c;
}

Array sub(const Array& a, const Array& b) {
    check_same(a, b, "sub");
    Array c(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
    return c;
}

Array mul(const Array& a, const Array& b) {
    check_same(a, b, "mul");
    Array c(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] * b[i];
    return c;
}

Array scale(const Array& a, double c) {
    Array r(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
    return r;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double max_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace pinnosc
