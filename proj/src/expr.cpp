#include "prange/expr.hpp"

#include "prange/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace prange {

struct Expr::Node {
    Op op = Op::Constant;
    double value = 0.0;
    std::size_t index = 0;
    int exponent = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

const std::shared_ptr<const Expr::Node>& zero_node() {
    static const auto node = std::make_shared<const Expr::Node>();
    return node;
}

std::size_t arity_of(Op op) {
    switch (op) {
        case Op::Constant:
        case Op::Variable:
            return 0;
        case Op::Negate:
        case Op::Power:
        case Op::Sqrt:
        case Op::Cos:
        case Op::Acos:
            return 1;
        default:
            return 2;
    }
}

} // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(double value) {
    if (value == 0.0 && !std::signbit(value)) {
        return Expr();
    }
    auto n = std::make_shared<Node>();
    n->op = Op::Constant;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::variable(std::size_t index) {
    auto n = std::make_shared<Node>();
    n->op = Op::Variable;
    n->index = index;
    return Expr(std::move(n));
}

Expr Expr::make(Op op, Expr a, Expr b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->lhs = std::move(a.node_);
    if (arity_of(op) == 2) {
        n->rhs = std::move(b.node_);
    }
    return Expr(std::move(n));
}

Expr Expr::negate(Expr a) { return make(Op::Negate, std::move(a), {}); }
Expr Expr::add(Expr a, Expr b) { return make(Op::Add, std::move(a), std::move(b)); }
Expr Expr::subtract(Expr a, Expr b) { return make(Op::Subtract, std::move(a), std::move(b)); }
Expr Expr::multiply(Expr a, Expr b) { return make(Op::Multiply, std::move(a), std::move(b)); }
Expr Expr::divide(Expr a, Expr b) { return make(Op::Divide, std::move(a), std::move(b)); }
Expr Expr::sqrt(Expr a) { return make(Op::Sqrt, std::move(a), {}); }
Expr Expr::cos(Expr a) { return make(Op::Cos, std::move(a), {}); }
Expr Expr::acos(Expr a) { return make(Op::Acos, std::move(a), {}); }

Expr Expr::power(Expr base, int exponent) {
    if (exponent < 0) {
        throw Error(ErrorCode::ParseError, "negative exponent " + std::to_string(exponent));
    }
    auto n = std::make_shared<Node>();
    n->op = Op::Power;
    n->exponent = exponent;
    n->lhs = std::move(base.node_);
    return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
std::size_t Expr::index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
std::size_t Expr::arity() const { return arity_of(node_->op); }

Expr Expr::child(std::size_t i) const {
    return Expr(i == 0 ? node_->lhs : node_->rhs);
}

Expr operator-(Expr a) { return Expr::negate(std::move(a)); }
Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::subtract(std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::multiply(std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::divide(std::move(a), std::move(b)); }
Expr operator+(Expr a, double b) { return Expr::add(std::move(a), Expr::constant(b)); }
Expr operator-(Expr a, double b) { return Expr::subtract(std::move(a), Expr::constant(b)); }
Expr operator*(double a, Expr b) { return Expr::multiply(Expr::constant(a), std::move(b)); }
Expr operator*(Expr a, double b) { return Expr::multiply(std::move(a), Expr::constant(b)); }

// ---------------------------------------------------------------------------
// Folding constructors shared by simplify() and differentiate().

namespace {

Expr fold_negate(const Expr& a) {
    if (a.is_constant()) return Expr::constant(-a.value());
    if (a.op() == Op::Negate) return a.child(0);
    return Expr::negate(a);
}

Expr fold_add(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    if (b.op() == Op::Negate) return Expr::subtract(a, b.child(0));
    return Expr::add(a, b);
}

Expr fold_subtract(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return fold_negate(b);
    if (a.id() == b.id()) return Expr();
    if (b.op() == Op::Negate) return Expr::add(a, b.child(0));
    return Expr::subtract(a, b);
}

Expr fold_multiply(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
    if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr();
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(-1.0)) return fold_negate(b);
    if (b.is_constant(-1.0)) return fold_negate(a);
    // keep constants on the left so they meet each other
    if (b.is_constant()) return Expr::multiply(b, a);
    if (a.is_constant() && b.op() == Op::Multiply && b.child(0).is_constant()) {
        return fold_multiply(Expr::constant(a.value() * b.child(0).value()), b.child(1));
    }
    return Expr::multiply(a, b);
}

Expr fold_divide(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant() && b.value() != 0.0) {
        return Expr::constant(a.value() / b.value());
    }
    if (a.is_constant(0.0)) return Expr();
    if (b.is_constant(1.0)) return a;
    return Expr::divide(a, b);
}

Expr fold_power(const Expr& a, int k) {
    if (k == 0) return Expr::constant(1.0);
    if (k == 1) return a;
    if (a.is_constant()) return Expr::constant(std::pow(a.value(), k));
    return Expr::power(a, k);
}

Expr fold_sqrt(const Expr& a) {
    if (a.is_constant() && a.value() >= 0.0) return Expr::constant(std::sqrt(a.value()));
    return Expr::sqrt(a);
}

Expr fold_cos(const Expr& a) {
    if (a.is_constant()) return Expr::constant(std::cos(a.value()));
    return Expr::cos(a);
}

Expr fold_acos(const Expr& a) {
    if (a.is_constant() && std::abs(a.value()) <= 1.0) return Expr::constant(std::acos(a.value()));
    return Expr::acos(a);
}

Expr rebuild_folded(const Expr& e, const Expr& a, const Expr& b) {
    switch (e.op()) {
        case Op::Constant:
        case Op::Variable: return e;
        case Op::Negate: return fold_negate(a);
        case Op::Add: return fold_add(a, b);
        case Op::Subtract: return fold_subtract(a, b);
        case Op::Multiply: return fold_multiply(a, b);
        case Op::Divide: return fold_divide(a, b);
        case Op::Power: return fold_power(a, e.exponent());
        case Op::Sqrt: return fold_sqrt(a);
        case Op::Cos: return fold_cos(a);
        case Op::Acos: return fold_acos(a);
    }
    return e;
}

template <class Fn>
class Memo {
public:
    explicit Memo(Fn fn) : fn_(std::move(fn)) {}

    Expr operator()(const Expr& e) {
        if (auto it = cache_.find(e.id()); it != cache_.end()) {
            return it->second;
        }
        Expr out = fn_(*this, e);
        cache_.emplace(e.id(), out);
        return out;
    }

private:
    Fn fn_;
    std::unordered_map<const Expr::Node*, Expr> cache_;
};

} // namespace

// ---------------------------------------------------------------------------

double eval(const Expr& root, std::span<const double> x) {
    std::unordered_map<const Expr::Node*, double> cache;
    auto rec = [&](auto& self, const Expr& e) -> double {
        if (e.op() == Op::Constant) return e.value();
        if (e.op() == Op::Variable) {
            if (e.index() >= x.size()) {
                throw Error(ErrorCode::Precondition,
                            "variable x" + std::to_string(e.index()) + " outside coordinate vector");
            }
            return x[e.index()];
        }
        if (auto it = cache.find(e.id()); it != cache.end()) return it->second;

        const double a = self(self, e.child(0));
        double r = 0.0;
        switch (e.op()) {
            case Op::Negate: r = -a; break;
            case Op::Add: r = a + self(self, e.child(1)); break;
            case Op::Subtract: r = a - self(self, e.child(1)); break;
            case Op::Multiply: r = a * self(self, e.child(1)); break;
            case Op::Divide: {
                const double b = self(self, e.child(1));
                if (b == 0.0) throw DivisionByZero("division by zero");
                r = a / b;
                break;
            }
            case Op::Power: r = std::pow(a, e.exponent()); break;
            case Op::Sqrt:
                if (a < 0.0) throw DomainError("sqrt of negative value " + std::to_string(a));
                r = std::sqrt(a);
                break;
            case Op::Cos: r = std::cos(a); break;
            case Op::Acos:
                if (a < -1.0 || a > 1.0) {
                    throw DomainError("acos argument " + std::to_string(a) + " outside [-1, 1]");
                }
                r = std::acos(a);
                break;
            default: break;
        }
        cache.emplace(e.id(), r);
        return r;
    };
    return rec(rec, root);
}

Expr simplify(const Expr& root) {
    Memo memo([](auto& self, const Expr& e) -> Expr {
        switch (e.arity()) {
            case 0: return e;
            case 1: return rebuild_folded(e, self(e.child(0)), Expr());
            default: return rebuild_folded(e, self(e.child(0)), self(e.child(1)));
        }
    });
    return memo(root);
}

Expr differentiate(const Expr& root, std::size_t index) {
    const double half_pi = std::numbers::pi / 2.0;
    Memo memo([index, half_pi](auto& self, const Expr& e) -> Expr {
        switch (e.op()) {
            case Op::Constant: return Expr();
            case Op::Variable: return e.index() == index ? Expr::constant(1.0) : Expr();
            case Op::Negate: return fold_negate(self(e.child(0)));
            case Op::Add: return fold_add(self(e.child(0)), self(e.child(1)));
            case Op::Subtract: return fold_subtract(self(e.child(0)), self(e.child(1)));
            case Op::Multiply: {
                const Expr a = e.child(0), b = e.child(1);
                return fold_add(fold_multiply(self(a), b), fold_multiply(a, self(b)));
            }
            case Op::Divide: {
                const Expr a = e.child(0), b = e.child(1);
                const Expr da = self(a), db = self(b);
                if (db.is_constant(0.0)) return fold_divide(da, b);
                return fold_divide(fold_subtract(fold_multiply(da, b), fold_multiply(a, db)),
                                   fold_power(b, 2));
            }
            case Op::Power: {
                const Expr a = e.child(0);
                const int k = e.exponent();
                if (k == 0) return Expr();
                return fold_multiply(fold_multiply(Expr::constant(k), fold_power(a, k - 1)), self(a));
            }
            case Op::Sqrt: {
                const Expr da = self(e.child(0));
                if (da.is_constant(0.0)) return Expr();
                return fold_divide(da, fold_multiply(Expr::constant(2.0), e));
            }
            case Op::Cos: {
                // sin(u) = cos(u - pi/2), which keeps us inside the node set
                const Expr a = e.child(0);
                const Expr da = self(a);
                if (da.is_constant(0.0)) return Expr();
                const Expr sine = fold_cos(fold_subtract(a, Expr::constant(half_pi)));
                return fold_negate(fold_multiply(sine, da));
            }
            case Op::Acos: {
                const Expr a = e.child(0);
                const Expr da = self(a);
                if (da.is_constant(0.0)) return Expr();
                const Expr root1m = fold_sqrt(fold_subtract(Expr::constant(1.0), fold_power(a, 2)));
                return fold_negate(fold_divide(da, root1m));
            }
        }
        return Expr();
    });
    return memo(root);
}

Expr substitute(const Expr& root, const std::function<Expr(std::size_t)>& replacement) {
    Memo memo([&replacement](auto& self, const Expr& e) -> Expr {
        switch (e.arity()) {
            case 0: return e.op() == Op::Variable ? replacement(e.index()) : e;
            case 1: {
                const Expr a = self(e.child(0));
                if (a.id() == e.child(0).id()) return e;
                return e.op() == Op::Power ? Expr::power(a, e.exponent())
                     : e.op() == Op::Negate ? Expr::negate(a)
                     : e.op() == Op::Sqrt ? Expr::sqrt(a)
                     : e.op() == Op::Cos ? Expr::cos(a)
                     : Expr::acos(a);
            }
            default: {
                const Expr a = self(e.child(0)), b = self(e.child(1));
                if (a.id() == e.child(0).id() && b.id() == e.child(1).id()) return e;
                switch (e.op()) {
                    case Op::Add: return a + b;
                    case Op::Subtract: return a - b;
                    case Op::Multiply: return a * b;
                    default: return a / b;
                }
            }
        }
    });
    return memo(root);
}

Expr remap_variables(const Expr& e, std::span<const std::size_t> map, std::span<const double> pinned) {
    std::unordered_map<std::size_t, Expr> vars;
    return simplify(substitute(e, [&](std::size_t i) -> Expr {
        if (i >= map.size()) {
            throw Error(ErrorCode::Precondition, "variable index outside remap table");
        }
        if (map[i] == static_cast<std::size_t>(-1)) return Expr::constant(pinned[i]);
        auto [it, inserted] = vars.try_emplace(i);
        if (inserted) it->second = Expr::variable(map[i]);
        return it->second;
    }));
}

namespace {

template <class Visit>
void walk_unique(const Expr& root, Visit&& visit) {
    std::unordered_set<const Expr::Node*> seen;
    std::vector<Expr> stack{root};
    while (!stack.empty()) {
        Expr e = stack.back();
        stack.pop_back();
        if (!seen.insert(e.id()).second) continue;
        visit(e);
        for (std::size_t i = 0; i < e.arity(); ++i) stack.push_back(e.child(i));
    }
}

} // namespace

bool depends_on(const Expr& e, std::size_t index) {
    bool found = false;
    walk_unique(e, [&](const Expr& n) {
        if (n.op() == Op::Variable && n.index() == index) found = true;
    });
    return found;
}

std::size_t variable_extent(const Expr& e) {
    std::size_t extent = 0;
    walk_unique(e, [&](const Expr& n) {
        if (n.op() == Op::Variable) extent = std::max(extent, n.index() + 1);
    });
    return extent;
}

std::size_t node_count(const Expr& e) {
    std::size_t count = 0;
    walk_unique(e, [&](const Expr&) { ++count; });
    return count;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.id() == b.id()) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
        case Op::Constant: return a.value() == b.value();
        case Op::Variable: return a.index() == b.index();
        case Op::Power:
            return a.exponent() == b.exponent() && structurally_equal(a.child(0), b.child(0));
        default:
            for (std::size_t i = 0; i < a.arity(); ++i) {
                if (!structurally_equal(a.child(i), b.child(i))) return false;
            }
            return true;
    }
}

std::string to_string(const Expr& root, const std::function<std::string(std::size_t)>& name) {
    auto rec = [&](auto& self, const Expr& e) -> std::string {
        switch (e.op()) {
            case Op::Constant: {
                std::ostringstream os;
                os.precision(17);
                os << e.value();
                return e.value() < 0 ? "(" + os.str() + ")" : os.str();
            }
            case Op::Variable:
                return name ? name(e.index()) : "x" + std::to_string(e.index());
            case Op::Negate: return "(-" + self(self, e.child(0)) + ")";
            case Op::Add: return "(" + self(self, e.child(0)) + " + " + self(self, e.child(1)) + ")";
            case Op::Subtract: return "(" + self(self, e.child(0)) + " - " + self(self, e.child(1)) + ")";
            case Op::Multiply: return self(self, e.child(0)) + "*" + self(self, e.child(1));
            case Op::Divide: return self(self, e.child(0)) + "/(" + self(self, e.child(1)) + ")";
            case Op::Power: return self(self, e.child(0)) + "^" + std::to_string(e.exponent());
            case Op::Sqrt: return "sqrt(" + self(self, e.child(0)) + ")";
            case Op::Cos: return "cos(" + self(self, e.child(0)) + ")";
            case Op::Acos: return "acos(" + self(self, e.child(0)) + ")";
        }
        return {};
    };
    return rec(rec, root);
}

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::UnknownEntity: return "UnknownEntity";
        case ErrorCode::DuplicateId: return "DuplicateId";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::UnknownParameter: return "UnknownParameter";
        case ErrorCode::UnsupportedConstraint: return "UnsupportedConstraint";
        case ErrorCode::SeparationError: return "SeparationError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::RecursionLimit: return "RecursionLimit";
        case ErrorCode::SolveFailure: return "SolveFailure";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::StaleRanges: return "StaleRanges";
        case ErrorCode::EmptyHistory: return "EmptyHistory";
        case ErrorCode::Precondition: return "Precondition";
    }
    return "Unknown";
}

} // namespace prange
