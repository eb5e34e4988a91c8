#pragma once

#include <cstdint>
#include <vector>

#include "pinnosc/array.hpp"
#include "pinnosc/jet.hpp"

namespace pinnosc {

/// Reverse-mode tape over array-valued nodes. Each node holds an array of jet
/// values (one coefficient block per entry); scalar arithmetic is the trivial
/// one-coefficient case. Derivatives of a recorded scalar loss are taken with
/// respect to registered leaf arrays; jet coefficients ride along through the
/// chain rule, which is what lets a single backward pass differentiate losses
/// containing input derivatives of a network (truncated products have
/// truncated products as parameter-Jacobians on a downward-closed support).
///
/// The graph is static after construction: forward() re-evaluates every node
/// from the current leaf contents, so a training loop builds the tape once and
/// then alternates forward/backward with in-place parameter updates. A tape is
/// single-threaded; independent tapes may run concurrently.
class Tape {
  public:
    struct Var {
        int id = -1;
        bool valid() const { return id >= 0; }
    };

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    Tape(Tape&&) = default;
    Tape& operator=(Tape&&) = default;

    /// Registered parameter leaf. The pointed-to array must outlive the tape;
    /// forward() reads it anew, so in-place updates are picked up.
    Var leaf(Array* param);
    Var constant(const Array& value);
    /// Constant with jet entries: coeffs laid out entry-major, spec.count()
    /// doubles per entry.
    Var constant_jets(std::vector<int> shape, JetSpecPtr spec, std::vector<double> coeffs);

    /// x[n×i] (jets ok) times w[o×i] transposed, plus b[o] (pass {} for none) -> [n×o].
    Var affine(Var x, Var w, Var b);
    /// General a[m×k]·b[k×n]; scalar entries only.
    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);  // elementwise; equal specs, or one side scalar-entried
    Var divide(Var a, Var b);  // elementwise; scalar entries only
    Var affine_scalar(Var a, double alpha, double beta);  // alpha*a + beta
    Var tanh(Var a);
    Var sigmoid(Var a);
    Var identity_activation(Var a) { return affine_scalar(a, 1.0, 0.0); }
    /// Derivative extraction d^{dx+dt}/dx^{dx} dt^{dt} -> scalar-entried array.
    Var extract(Var a, int dx, int dt);
    Var col(Var a, int j);  // column j of [n×m] -> [n]
    Var sum(Var a);         // -> [1]
    Var mean(Var a);        // -> [1]
    /// sum((a - target)^2) -> [1]; scalar entries.
    Var sq_diff_sum(Var a, Array target);

    /// Re-evaluate every node in recording order from current leaf contents.
    void forward();
    /// Accumulate adjoints of `loss` (shape [1], scalar entries) into every
    /// node; throws NumericError if the loss value is not finite.
    void backward(Var loss);

    double scalar_value(Var v) const;
    const std::vector<double>& values(Var v) const { return node(v).val; }
    const std::vector<int>& shape(Var v) const { return node(v).shape; }
    const JetSpecPtr& spec(Var v) const { return node(v).spec; }
    /// Gradient of the last backward()'s loss w.r.t. a leaf.
    Array grad(Var leaf) const;

    int size() const { return static_cast<int>(nodes_.size()); }

  private:
    enum class Op : std::uint8_t {
        Leaf,
        Constant,
        Affine,
        Matmul,
        Add,
        Sub,
        Mul,
        Div,
        AffineScalar,
        Tanh,
        Sigmoid,
        Extract,
        Col,
        Sum,
        Mean,
        SqDiffSum,
    };

    struct Node {
        Op op;
        int p0 = -1, p1 = -1, p2 = -1;
        int i0 = 0, i1 = 0;
        double a0 = 0.0, a1 = 0.0;
        JetSpecPtr spec;
        std::vector<int> shape;
        std::vector<double> val;
        std::vector<double> adj;
        Array* external = nullptr;
        Array aux;
        int entries = 0;
        int ncoeff = 1;
        bool active = false;  // has a leaf in its ancestry; inactive nodes skip adjoints
    };

    Node& node(Var v) { return nodes_[static_cast<std::size_t>(v.id)]; }
    const Node& node(Var v) const { return nodes_[static_cast<std::size_t>(v.id)]; }
    Var push(Node n);
    void eval(Node& n);
    void propagate(Node& n);

    std::vector<Node> nodes_;
};

using Var = Tape::Var;

/// Arithmetic sugar over tape variables, so generic formulas can be written
/// once and instantiated for both plain doubles and recorded arrays.
struct Expr {
    Tape* tape = nullptr;
    Var v;

    friend Expr operator+(const Expr& a, const Expr& b) { return {a.tape, a.tape->add(a.v, b.v)}; }
    friend Expr operator-(const Expr& a, const Expr& b) { return {a.tape, a.tape->sub(a.v, b.v)}; }
    friend Expr operator*(const Expr& a, const Expr& b) { return {a.tape, a.tape->mul(a.v, b.v)}; }
    friend Expr operator*(double s, const Expr& a) {
        return {a.tape, a.tape->affine_scalar(a.v, s, 0.0)};
    }
    friend Expr operator*(const Expr& a, double s) { return s * a; }
    friend Expr operator+(const Expr& a, double s) {
        return {a.tape, a.tape->affine_scalar(a.v, 1.0, s)};
    }
    friend Expr operator+(double s, const Expr& a) { return a + s; }
    friend Expr operator-(const Expr& a, double s) { return a + (-s); }
    friend Expr operator-(double s, const Expr& a) {
        return {a.tape, a.tape->affine_scalar(a.v, -1.0, s)};
    }
    Expr operator-() const { return {tape, tape->affine_scalar(v, -1.0, 0.0)}; }
};

}  // namespace pinnosc
