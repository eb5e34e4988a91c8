#include "pinnosc/tape.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace pinnosc {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw DimensionError(msg);
}

}  // namespace

Var Tape::push(Node n) {
    n.entries = static_cast<int>(shape_size(n.shape));
    n.ncoeff = n.spec->count();
    n.val.assign(static_cast<std::size_t>(n.entries) * n.ncoeff, 0.0);
    if (n.op == Op::Leaf)
        n.active = true;
    else
        for (int p : {n.p0, n.p1, n.p2})
            if (p >= 0 && nodes_[static_cast<std::size_t>(p)].active) n.active = true;
    nodes_.push_back(std::move(n));
    eval(nodes_.back());
    return Var{static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Array* param) {
    Node n;
    n.op = Op::Leaf;
    n.spec = JetSpec::scalar();
    n.shape = param->shape();
    n.external = param;
    return push(std::move(n));
}

Var Tape::constant(const Array& value) {
    Node n;
    n.op = Op::Constant;
    n.spec = JetSpec::scalar();
    n.shape = value.shape();
    Var v = push(std::move(n));
    std::copy(value.data(), value.data() + value.size(), node(v).val.begin());
    return v;
}

Var Tape::constant_jets(std::vector<int> shape, JetSpecPtr spec, std::vector<double> coeffs) {
    require(shape_size(shape) * static_cast<std::size_t>(spec->count()) == coeffs.size(),
            "constant_jets: coefficient buffer size mismatch");
    Node n;
    n.op = Op::Constant;
    n.spec = std::move(spec);
    n.shape = std::move(shape);
    Var v = push(std::move(n));
    node(v).val = std::move(coeffs);
    return v;
}

Var Tape::affine(Var x, Var w, Var b) {
    const Node &nx = node(x), &nw = node(w);
    require(nw.shape.size() == 2, "affine: weight must be rank 2");
    const int in = nw.shape[1], out = nw.shape[0];
    require(nw.spec->trivial(), "affine: weight must have scalar entries");
    std::vector<int> oshape;
    if (nx.shape.size() == 1) {
        require(nx.shape[0] == in, "affine: input width mismatch");
        oshape = {out};
    } else {
        require(nx.shape.size() == 2 && nx.shape[1] == in, "affine: input width mismatch");
        oshape = {nx.shape[0], out};
    }
    if (b.valid()) {
        const Node& nb = node(b);
        require(nb.entries == out && nb.spec->trivial(), "affine: bias shape mismatch");
    }
    Node n;
    n.op = Op::Affine;
    n.p0 = x.id;
    n.p1 = w.id;
    n.p2 = b.id;
    n.spec = nx.spec;
    n.shape = std::move(oshape);
    return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
    const Node &na = node(a), &nb = node(b);
    require(na.shape.size() == 2 && nb.shape.size() == 2, "matmul: rank-2 arrays expected");
    require(na.shape[1] == nb.shape[0], "matmul: inner dimensions differ");
    require(na.spec->trivial() && nb.spec->trivial(), "matmul: scalar entries only");
    Node n;
    n.op = Op::Matmul;
    n.p0 = a.id;
    n.p1 = b.id;
    n.spec = na.spec;
    n.shape = {na.shape[0], nb.shape[1]};
    return push(std::move(n));
}

namespace {
bool specs_equal(const JetSpecPtr& a, const JetSpecPtr& b) { return a->same(*b); }
}  // namespace

Var Tape::add(Var a, Var b) {
    const Node &na = node(a), &nb = node(b);
    require(na.shape == nb.shape && specs_equal(na.spec, nb.spec), "add: operand mismatch");
    Node n;
    n.op = Op::Add;
    n.p0 = a.id;
    n.p1 = b.id;
    n.spec = na.spec;
    n.shape = na.shape;
    return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
    const Node &na = node(a), &nb = node(b);
    require(na.shape == nb.shape && specs_equal(na.spec, nb.spec), "sub: operand mismatch");
    Node n;
    n.op = Op::Sub;
    n.p0 = a.id;
    n.p1 = b.id;
    n.spec = na.spec;
    n.shape = na.shape;
    return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
    const Node &na = node(a), &nb = node(b);
    require(na.shape == nb.shape, "mul: shape mismatch");
    require(specs_equal(na.spec, nb.spec) || na.spec->trivial() || nb.spec->trivial(),
            "mul: incompatible jet supports");
    Node n;
    n.op = Op::Mul;
    n.p0 = a.id;
    n.p1 = b.id;
    n.spec = na.spec->trivial() ? nb.spec : na.spec;
    n.shape = na.shape;
    return push(std::move(n));
}

Var Tape::divide(Var a, Var b) {
    const Node &na = node(a), &nb = node(b);
    require(na.shape == nb.shape, "divide: shape mismatch");
    require(na.spec->trivial() && nb.spec->trivial(), "divide: scalar entries only");
    Node n;
    n.op = Op::Div;
    n.p0 = a.id;
    n.p1 = b.id;
    n.spec = na.spec;
    n.shape = na.shape;
    return push(std::move(n));
}

Var Tape::affine_scalar(Var a, double alpha, double beta) {
    const Node& na = node(a);
    Node n;
    n.op = Op::AffineScalar;
    n.p0 = a.id;
    n.a0 = alpha;
    n.a1 = beta;
    n.spec = na.spec;
    n.shape = na.shape;
    return push(std::move(n));
}

Var Tape::tanh(Var a) {
    Node n;
    n.op = Op::Tanh;
    n.p0 = a.id;
    n.spec = node(a).spec;
    n.shape = node(a).shape;
    return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
    Node n;
    n.op = Op::Sigmoid;
    n.p0 = a.id;
    n.spec = node(a).spec;
    n.shape = node(a).shape;
    return push(std::move(n));
}

Var Tape::extract(Var a, int dx, int dt) {
    const Node& na = node(a);
    const int p = na.spec->pos(dx, dt);
    if (p < 0) throw ArgumentError("extract: derivative order outside jet support");
    Node n;
    n.op = Op::Extract;
    n.p0 = a.id;
    n.i0 = p;
    n.a0 = na.spec->extract_factor(p);
    n.spec = JetSpec::scalar();
    n.shape = na.shape;
    return push(std::move(n));
}

Var Tape::col(Var a, int j) {
    const Node& na = node(a);
    require(na.shape.size() == 2 && j >= 0 && j < na.shape[1], "col: bad column");
    Node n;
    n.op = Op::Col;
    n.p0 = a.id;
    n.i0 = j;
    n.spec = na.spec;
    n.shape = {na.shape[0]};
    return push(std::move(n));
}

Var Tape::sum(Var a) {
    require(node(a).spec->trivial(), "sum: scalar entries only");
    Node n;
    n.op = Op::Sum;
    n.p0 = a.id;
    n.spec = JetSpec::scalar();
    n.shape = {1};
    return push(std::move(n));
}

Var Tape::mean(Var a) {
    require(node(a).spec->trivial(), "mean: scalar entries only");
    Node n;
    n.op = Op::Mean;
    n.p0 = a.id;
    n.spec = JetSpec::scalar();
    n.shape = {1};
    return push(std::move(n));
}

Var Tape::sq_diff_sum(Var a, Array target) {
    const Node& na = node(a);
    require(na.spec->trivial(), "sq_diff_sum: scalar entries only");
    require(static_cast<std::size_t>(na.entries) == target.size(), "sq_diff_sum: target size");
    Node n;
    n.op = Op::SqDiffSum;
    n.p0 = a.id;
    n.aux = std::move(target);
    n.spec = JetSpec::scalar();
    n.shape = {1};
    return push(std::move(n));
}

void Tape::eval(Node& n) {
    switch (n.op) {
        case Op::Leaf:
            std::copy(n.external->data(), n.external->data() + n.external->size(),
                      n.val.begin());
            break;
        case Op::Constant:
            break;
        case Op::Affine: {
            const Node &x = nodes_[static_cast<std::size_t>(n.p0)],
                       &w = nodes_[static_cast<std::size_t>(n.p1)];
            const int out = w.shape[0], in = w.shape[1], nc = n.ncoeff;
            const int rows = n.entries / out;
            const double* bp = n.p2 >= 0 ? nodes_[static_cast<std::size_t>(n.p2)].val.data()
                                         : nullptr;
            for (int r = 0; r < rows; ++r) {
                const double* xr = x.val.data() + static_cast<std::size_t>(r) * in * nc;
                double* yr = n.val.data() + static_cast<std::size_t>(r) * out * nc;
                for (int o = 0; o < out; ++o) {
                    const double* wrow = w.val.data() + static_cast<std::size_t>(o) * in;
                    double* y = yr + static_cast<std::size_t>(o) * nc;
                    std::fill(y, y + nc, 0.0);
                    for (int i = 0; i < in; ++i) {
                        const double wv = wrow[i];
                        const double* xc = xr + static_cast<std::size_t>(i) * nc;
                        for (int c = 0; c < nc; ++c) y[c] += wv * xc[c];
                    }
                    if (bp) y[0] += bp[o];
                }
            }
            break;
        }
        case Op::Matmul: {
            const Node &a = nodes_[static_cast<std::size_t>(n.p0)],
                       &b = nodes_[static_cast<std::size_t>(n.p1)];
            const int m = a.shape[0], k = a.shape[1], c = b.shape[1];
            std::fill(n.val.begin(), n.val.end(), 0.0);
            for (int i = 0; i < m; ++i)
                for (int p = 0; p < k; ++p) {
                    const double av = a.val[static_cast<std::size_t>(i) * k + p];
                    for (int j = 0; j < c; ++j)
                        n.val[static_cast<std::size_t>(i) * c + j] +=
                            av * b.val[static_cast<std::size_t>(p) * c + j];
                }
            break;
        }
        case Op::Add: {
            const auto &a = nodes_[static_cast<std::size_t>(n.p0)].val,
                       &b = nodes_[static_cast<std::size_t>(n.p1)].val;
            for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] = a[i] + b[i];
            break;
        }
        case Op::Sub: {
            const auto &a = nodes_[static_cast<std::size_t>(n.p0)].val,
                       &b = nodes_[static_cast<std::size_t>(n.p1)].val;
            for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] = a[i] - b[i];
            break;
        }
        case Op::Mul: {
            const Node &a = nodes_[static_cast<std::size_t>(n.p0)],
                       &b = nodes_[static_cast<std::size_t>(n.p1)];
            const int nc = n.ncoeff;
            if (a.ncoeff == nc && b.ncoeff == nc && nc > 1) {
                for (int e = 0; e < n.entries; ++e)
                    jet_mul(*n.spec, a.val.data() + static_cast<std::size_t>(e) * nc,
                            b.val.data() + static_cast<std::size_t>(e) * nc,
                            n.val.data() + static_cast<std::size_t>(e) * nc);
            } else if (nc == 1) {
                for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] = a.val[i] * b.val[i];
            } else {
                const Node& jets = a.ncoeff == nc ? a : b;
                const Node& sc = a.ncoeff == nc ? b : a;
                for (int e = 0; e < n.entries; ++e) {
                    const double s = sc.val[static_cast<std::size_t>(e)];
                    for (int c = 0; c < nc; ++c)
                        n.val[static_cast<std::size_t>(e) * nc + c] =
                            s * jets.val[static_cast<std::size_t>(e) * nc + c];
                }
            }
            break;
        }
        case Op::Div: {
            const auto &a = nodes_[static_cast<std::size_t>(n.p0)].val,
                       &b = nodes_[static_cast<std::size_t>(n.p1)].val;
            for (std::size_t i = 0; i < n.val.size(); ++i) n.val[i] = a[i] / b[i];
            break;
        }
        case Op::AffineScalar: {
            const auto& a = nodes_[static_cast<std::size_t>(n.p0)].val;
            const int nc = n.ncoeff;
            for (int e = 0; e < n.entries; ++e) {
                for (int c = 0; c < nc; ++c)
                    n.val[static_cast<std::size_t>(e) * nc + c] =
                        n.a0 * a[static_cast<std::size_t>(e) * nc + c];
                n.val[static_cast<std::size_t>(e) * nc] += n.a1;
            }
            break;
        }
        case Op::Tanh:
        case Op::Sigmoid: {
            const Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            const int nc = n.ncoeff;
            if (nc == 1) {
                if (n.op == Op::Tanh)
                    for (std::size_t i = 0; i < n.val.size(); ++i)
                        n.val[i] = std::tanh(a.val[i]);
                else
                    for (std::size_t i = 0; i < n.val.size(); ++i)
                        n.val[i] = 1.0 / (1.0 + std::exp(-a.val[i]));
            } else {
                const int K = n.spec->max_total();
                double d[8];
                for (int e = 0; e < n.entries; ++e) {
                    const double* av = a.val.data() + static_cast<std::size_t>(e) * nc;
                    if (n.op == Op::Tanh)
                        tanh_series(av[0], K, d);
                    else
                        sigmoid_series(av[0], K, d);
                    jet_compose(*n.spec, av, d, n.val.data() + static_cast<std::size_t>(e) * nc);
                }
            }
            break;
        }
        case Op::Extract: {
            const Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            const int nc = a.ncoeff;
            for (int e = 0; e < n.entries; ++e)
                n.val[static_cast<std::size_t>(e)] =
                    n.a0 * a.val[static_cast<std::size_t>(e) * nc + n.i0];
            break;
        }
        case Op::Col: {
            const Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            const int m = a.shape[1], nc = n.ncoeff;
            for (int r = 0; r < n.entries; ++r)
                std::copy_n(
                    a.val.data() + (static_cast<std::size_t>(r) * m + n.i0) * nc, nc,
                    n.val.data() + static_cast<std::size_t>(r) * nc);
            break;
        }
        case Op::Sum:
        case Op::Mean: {
            const auto& a = nodes_[static_cast<std::size_t>(n.p0)].val;
            double s = 0.0;
            for (double v : a) s += v;
            n.val[0] = n.op == Op::Sum ? s : s / static_cast<double>(a.size());
            break;
        }
        case Op::SqDiffSum: {
            const auto& a = nodes_[static_cast<std::size_t>(n.p0)].val;
            double s = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double d = a[i] - n.aux[i];
                s += d * d;
            }
            n.val[0] = s;
            break;
        }
    }
}

void Tape::forward() {
    for (auto& n : nodes_)
        if (n.op != Op::Constant) eval(n);
}

void Tape::backward(Var loss) {
    Node& ln = node(loss);
    require(ln.entries == 1 && ln.ncoeff == 1, "backward: loss must be a scalar");
    if (!std::isfinite(ln.val[0]))
        throw NumericError("backward: loss is not finite", ln.val[0]);
    for (auto& n : nodes_)
        if (n.active) n.adj.assign(n.val.size(), 0.0);
    if (!ln.active) return;  // loss has no parameter ancestry: all gradients zero
    ln.adj[0] = 1.0;
    for (std::size_t i = nodes_.size(); i-- > 0;)
        if (nodes_[i].active) propagate(nodes_[i]);
}

void Tape::propagate(Node& n) {
    switch (n.op) {
        case Op::Leaf:
        case Op::Constant:
            break;
        case Op::Affine: {
            Node &x = nodes_[static_cast<std::size_t>(n.p0)],
                 &w = nodes_[static_cast<std::size_t>(n.p1)];
            const int out = w.shape[0], in = w.shape[1], nc = n.ncoeff;
            const int rows = n.entries / out;
            const bool ax = x.active, aw = w.active;
            for (int r = 0; r < rows; ++r) {
                const double* xr = x.val.data() + static_cast<std::size_t>(r) * in * nc;
                double* xbr = ax ? x.adj.data() + static_cast<std::size_t>(r) * in * nc
                               : nullptr;
                const double* ybr = n.adj.data() + static_cast<std::size_t>(r) * out * nc;
                for (int o = 0; o < out; ++o) {
                    const double* yb = ybr + static_cast<std::size_t>(o) * nc;
                    const double* wrow = w.val.data() + static_cast<std::size_t>(o) * in;
                    if (ax && aw) {
                        double* wbar = w.adj.data() + static_cast<std::size_t>(o) * in;
                        for (int i = 0; i < in; ++i) {
                            const double wv = wrow[i];
                            const double* xc = xr + static_cast<std::size_t>(i) * nc;
                            double* xb = xbr + static_cast<std::size_t>(i) * nc;
                            double acc = 0.0;
                            for (int c = 0; c < nc; ++c) {
                                xb[c] += wv * yb[c];
                                acc += yb[c] * xc[c];
                            }
                            wbar[i] += acc;
                        }
                    } else if (aw) {
                        double* wbar = w.adj.data() + static_cast<std::size_t>(o) * in;
                        for (int i = 0; i < in; ++i) {
                            const double* xc = xr + static_cast<std::size_t>(i) * nc;
                            double acc = 0.0;
                            for (int c = 0; c < nc; ++c) acc += yb[c] * xc[c];
                            wbar[i] += acc;
                        }
                    } else if (ax) {
                        for (int i = 0; i < in; ++i) {
                            const double wv = wrow[i];
                            double* xb = xbr + static_cast<std::size_t>(i) * nc;
                            for (int c = 0; c < nc; ++c) xb[c] += wv * yb[c];
                        }
                    }
                }
                if (n.p2 >= 0 && nodes_[static_cast<std::size_t>(n.p2)].active) {
                    double* bbar = nodes_[static_cast<std::size_t>(n.p2)].adj.data();
                    for (int o = 0; o < out; ++o)
                        bbar[o] += ybr[static_cast<std::size_t>(o) * nc];
                }
            }
            break;
        }
        case Op::Matmul: {
            Node &a = nodes_[static_cast<std::size_t>(n.p0)],
                 &b = nodes_[static_cast<std::size_t>(n.p1)];
            const int m = a.shape[0], k = a.shape[1], c = b.shape[1];
            for (int i = 0; i < m; ++i)
                for (int p = 0; p < k; ++p) {
                    double acc = 0.0;
                    const double av = a.val[static_cast<std::size_t>(i) * k + p];
                    for (int j = 0; j < c; ++j) {
                        const double cb = n.adj[static_cast<std::size_t>(i) * c + j];
                        acc += cb * b.val[static_cast<std::size_t>(p) * c + j];
                        if (b.active) b.adj[static_cast<std::size_t>(p) * c + j] += av * cb;
                    }
                    if (a.active) a.adj[static_cast<std::size_t>(i) * k + p] += acc;
                }
            break;
        }
        case Op::Add: {
            Node &a = nodes_[static_cast<std::size_t>(n.p0)],
                 &b = nodes_[static_cast<std::size_t>(n.p1)];
            if (a.active)
                for (std::size_t i = 0; i < n.adj.size(); ++i) a.adj[i] += n.adj[i];
            if (b.active)
                for (std::size_t i = 0; i < n.adj.size(); ++i) b.adj[i] += n.adj[i];
            break;
        }
        case Op::Sub: {
            Node &a = nodes_[static_cast<std::size_t>(n.p0)],
                 &b = nodes_[static_cast<std::size_t>(n.p1)];
            if (a.active)
                for (std::size_t i = 0; i < n.adj.size(); ++i) a.adj[i] += n.adj[i];
            if (b.active)
                for (std::size_t i = 0; i < n.adj.size(); ++i) b.adj[i] -= n.adj[i];
            break;
        }
        case Op::Mul: {
            Node &a = nodes_[static_cast<std::size_t>(n.p0)],
                 &b = nodes_[static_cast<std::size_t>(n.p1)];
            const int nc = n.ncoeff;
            if (a.ncoeff == nc && b.ncoeff == nc && nc > 1) {
                for (int e = 0; e < n.entries; ++e) {
                    const std::size_t off = static_cast<std::size_t>(e) * nc;
                    if (a.active)
                        jet_corr_acc(*n.spec, n.adj.data() + off, b.val.data() + off,
                                     a.adj.data() + off);
                    if (b.active)
                        jet_corr_acc(*n.spec, n.adj.data() + off, a.val.data() + off,
                                     b.adj.data() + off);
                }
            } else if (nc == 1) {
                if (a.active)
                    for (std::size_t i = 0; i < n.adj.size(); ++i)
                        a.adj[i] += n.adj[i] * b.val[i];
                if (b.active)
                    for (std::size_t i = 0; i < n.adj.size(); ++i)
                        b.adj[i] += n.adj[i] * a.val[i];
            } else {
                Node& jets = a.ncoeff == nc ? a : b;
                Node& sc = a.ncoeff == nc ? b : a;
                for (int e = 0; e < n.entries; ++e) {
                    const double s = sc.val[static_cast<std::size_t>(e)];
                    double acc = 0.0;
                    for (int c = 0; c < nc; ++c) {
                        const std::size_t i = static_cast<std::size_t>(e) * nc + c;
                        if (jets.active) jets.adj[i] += s * n.adj[i];
                        acc += n.adj[i] * jets.val[i];
                    }
                    if (sc.active) sc.adj[static_cast<std::size_t>(e)] += acc;
                }
            }
            break;
        }
        case Op::Div: {
            Node &a = nodes_[static_cast<std::size_t>(n.p0)],
                 &b = nodes_[static_cast<std::size_t>(n.p1)];
            for (std::size_t i = 0; i < n.adj.size(); ++i) {
                if (a.active) a.adj[i] += n.adj[i] / b.val[i];
                if (b.active) b.adj[i] -= n.adj[i] * n.val[i] / b.val[i];
            }
            break;
        }
        case Op::AffineScalar: {
            Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            for (std::size_t i = 0; i < n.adj.size(); ++i) a.adj[i] += n.a0 * n.adj[i];
            break;
        }
        case Op::Tanh:
        case Op::Sigmoid: {
            Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            const int nc = n.ncoeff;
            if (nc == 1) {
                if (n.op == Op::Tanh)
                    for (std::size_t i = 0; i < n.adj.size(); ++i)
                        a.adj[i] += n.adj[i] * (1.0 - n.val[i] * n.val[i]);
                else
                    for (std::size_t i = 0; i < n.adj.size(); ++i)
                        a.adj[i] += n.adj[i] * n.val[i] * (1.0 - n.val[i]);
            } else {
                // Local derivative as a jet: tanh' = 1 - y*y, sigmoid' = y - y*y.
                std::vector<double> g(static_cast<std::size_t>(nc));
                for (int e = 0; e < n.entries; ++e) {
                    const std::size_t off = static_cast<std::size_t>(e) * nc;
                    const double* y = n.val.data() + off;
                    jet_mul(*n.spec, y, y, g.data());
                    if (n.op == Op::Tanh) {
                        for (int c = 0; c < nc; ++c) g[static_cast<std::size_t>(c)] = -g[static_cast<std::size_t>(c)];
                        g[0] += 1.0;
                    } else {
                        for (int c = 0; c < nc; ++c)
                            g[static_cast<std::size_t>(c)] = y[c] - g[static_cast<std::size_t>(c)];
                    }
                    jet_corr_acc(*n.spec, n.adj.data() + off, g.data(), a.adj.data() + off);
                }
            }
            break;
        }
        case Op::Extract: {
            Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            const int nc = a.ncoeff;
            for (int e = 0; e < n.entries; ++e)
                a.adj[static_cast<std::size_t>(e) * nc + n.i0] +=
                    n.a0 * n.adj[static_cast<std::size_t>(e)];
            break;
        }
        case Op::Col: {
            Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            const int m = a.shape[1], nc = n.ncoeff;
            for (int r = 0; r < n.entries; ++r)
                for (int c = 0; c < nc; ++c)
                    a.adj[(static_cast<std::size_t>(r) * m + n.i0) * nc + c] +=
                        n.adj[static_cast<std::size_t>(r) * nc + c];
            break;
        }
        case Op::Sum: {
            Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            for (auto& v : a.adj) v += n.adj[0];
            break;
        }
        case Op::Mean: {
            Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            const double s = n.adj[0] / static_cast<double>(a.adj.size());
            for (auto& v : a.adj) v += s;
            break;
        }
        case Op::SqDiffSum: {
            Node& a = nodes_[static_cast<std::size_t>(n.p0)];
            for (std::size_t i = 0; i < a.adj.size(); ++i)
                a.adj[i] += 2.0 * (a.val[i] - n.aux[i]) * n.adj[0];
            break;
        }
    }
}

double Tape::scalar_value(Var v) const {
    const Node& n = node(v);
    require(n.entries == 1 && n.ncoeff == 1, "scalar_value: not a scalar node");
    return n.val[0];
}

Array Tape::grad(Var leaf) const {
    const Node& n = node(leaf);
    require(n.op == Op::Leaf, "grad: not a leaf");
    std::vector<double> g = n.adj;
    if (g.empty()) g.assign(n.val.size(), 0.0);
    return Array(n.shape, std::move(g));
}

}  // namespace pinnosc
