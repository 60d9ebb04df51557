#include "lyapcert/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>

namespace lyapcert {

namespace {

struct Token {
    enum class Kind {
        number,
        variable,
        func,
        lparen,
        rparen,
        plus,
        minus,
        star,
        slash,
        caret,
        end,
    };
    Kind kind = Kind::end;
    double number = 0.0;
    int var = 0;
    UnaryFunc func = UnaryFunc::neg;
    std::size_t offset = 0;
};

std::optional<UnaryFunc> lookup_function(std::string_view name) {
    if (name == "sin") return UnaryFunc::sin;
    if (name == "cos") return UnaryFunc::cos;
    if (name == "tan") return UnaryFunc::tan;
    if (name == "tanh") return UnaryFunc::tanh;
    if (name == "sech") return UnaryFunc::sech;
    if (name == "exp") return UnaryFunc::exp;
    if (name == "ln") return UnaryFunc::ln;
    if (name == "abs") return UnaryFunc::abs;
    if (name == "sqrt") return UnaryFunc::sqrt;
    return std::nullopt;
}

const char* function_name(UnaryFunc f) {
    switch (f) {
        case UnaryFunc::neg: return "-";
        case UnaryFunc::sin: return "sin";
        case UnaryFunc::cos: return "cos";
        case UnaryFunc::tan: return "tan";
        case UnaryFunc::tanh: return "tanh";
        case UnaryFunc::sech: return "sech";
        case UnaryFunc::exp: return "exp";
        case UnaryFunc::ln: return "ln";
        case UnaryFunc::abs: return "abs";
        case UnaryFunc::sqrt: return "sqrt";
    }
    return "?";
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
        Token t;
        t.offset = pos_;
        if (pos_ >= src_.size()) {
            t.kind = Token::Kind::end;
            return t;
        }
        const char c = src_[pos_];
        switch (c) {
            case '(': ++pos_; t.kind = Token::Kind::lparen; return t;
            case ')': ++pos_; t.kind = Token::Kind::rparen; return t;
            case '+': ++pos_; t.kind = Token::Kind::plus; return t;
            case '-': ++pos_; t.kind = Token::Kind::minus; return t;
            case '*': ++pos_; t.kind = Token::Kind::star; return t;
            case '/': ++pos_; t.kind = Token::Kind::slash; return t;
            case '^': ++pos_; t.kind = Token::Kind::caret; return t;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return lex_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return lex_identifier();
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

private:
    Token lex_number() {
        Token t;
        t.offset = pos_;
        t.kind = Token::Kind::number;
        const char* begin = src_.data() + pos_;
        const char* end = src_.data() + src_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr == begin) {
            throw ParseError("malformed number", pos_);
        }
        if (!std::isfinite(value)) {
            throw ParseError("numeric literal out of range", pos_);
        }
        pos_ += static_cast<std::size_t>(ptr - begin);
        t.number = value;
        return t;
    }

    Token lex_identifier() {
        Token t;
        t.offset = pos_;
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        std::string_view name = src_.substr(start, pos_ - start);
        // x<digits> is a variable reference
        if (name.size() >= 2 && name[0] == 'x') {
            bool all_digits = true;
            for (std::size_t i = 1; i < name.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(name[i]))) {
                    all_digits = false;
                    break;
                }
            }
            if (all_digits) {
                long idx = std::strtol(name.data() + 1, nullptr, 10);
                if (idx < 1) {
                    throw ParseError("variable indices start at x1", start);
                }
                t.kind = Token::Kind::variable;
                t.var = static_cast<int>(idx);
                return t;
            }
        }
        if (auto f = lookup_function(name)) {
            t.kind = Token::Kind::func;
            t.func = *f;
            return t;
        }
        throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace

class ExprParser {
public:
    ExprParser(std::string_view src, int max_var)
        : lexer_(src), max_var_limit_(max_var) {
        advance();
    }

    Expression run() {
        std::uint32_t root = parse_expr(0);
        (void)root; // root is by construction the last node in the arena
        if (tok_.kind != Token::Kind::end) {
            throw ParseError("unexpected trailing input", tok_.offset);
        }
        Expression e;
        e.nodes_ = std::move(nodes_);
        e.max_var_ = max_var_seen_;
        return e;
    }

private:
    static constexpr int k_max_depth = 200;

    void advance() { tok_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.offset); }

    std::uint32_t add(ExprNode n) {
        nodes_.push_back(n);
        return static_cast<std::uint32_t>(nodes_.size() - 1);
    }

    std::uint32_t parse_expr(int depth) {
        check_depth(depth);
        std::uint32_t lhs = parse_term(depth + 1);
        while (tok_.kind == Token::Kind::plus || tok_.kind == Token::Kind::minus) {
            BinaryOp op = tok_.kind == Token::Kind::plus ? BinaryOp::add : BinaryOp::sub;
            advance();
            std::uint32_t rhs = parse_term(depth + 1);
            ExprNode n;
            n.kind = ExprNode::Kind::binary;
            n.op = op;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = add(n);
        }
        return lhs;
    }

    std::uint32_t parse_term(int depth) {
        check_depth(depth);
        std::uint32_t lhs = parse_factor(depth + 1);
        while (tok_.kind == Token::Kind::star || tok_.kind == Token::Kind::slash) {
            BinaryOp op = tok_.kind == Token::Kind::star ? BinaryOp::mul : BinaryOp::div;
            advance();
            std::uint32_t rhs = parse_factor(depth + 1);
            ExprNode n;
            n.kind = ExprNode::Kind::binary;
            n.op = op;
            n.lhs = lhs;
            n.rhs = rhs;
            lhs = add(n);
        }
        return lhs;
    }

    std::uint32_t parse_factor(int depth) {
        check_depth(depth);
        if (tok_.kind == Token::Kind::minus) {
            advance();
            std::uint32_t arg = parse_factor(depth + 1);
            ExprNode n;
            n.kind = ExprNode::Kind::unary;
            n.func = UnaryFunc::neg;
            n.lhs = arg;
            return add(n);
        }
        return parse_power(depth + 1);
    }

    std::uint32_t parse_power(int depth) {
        check_depth(depth);
        std::uint32_t base = parse_primary(depth + 1);
        if (tok_.kind == Token::Kind::caret) {
            advance();
            // exponent re-enters at factor level: ^ is right-associative and
            // admits a leading unary minus (x^-2)
            std::uint32_t expo = parse_factor(depth + 1);
            ExprNode n;
            n.kind = ExprNode::Kind::binary;
            n.op = BinaryOp::pow;
            n.lhs = base;
            n.rhs = expo;
            return add(n);
        }
        return base;
    }

    std::uint32_t parse_primary(int depth) {
        check_depth(depth);
        switch (tok_.kind) {
            case Token::Kind::number: {
                ExprNode n;
                n.kind = ExprNode::Kind::constant;
                n.value = tok_.number;
                advance();
                return add(n);
            }
            case Token::Kind::variable: {
                if (max_var_limit_ > 0 && tok_.var > max_var_limit_) {
                    throw ParseError("variable x" + std::to_string(tok_.var) +
                                         " exceeds system dimension " +
                                         std::to_string(max_var_limit_),
                                     tok_.offset);
                }
                ExprNode n;
                n.kind = ExprNode::Kind::variable;
                n.var = tok_.var;
                if (tok_.var > max_var_seen_) max_var_seen_ = tok_.var;
                advance();
                return add(n);
            }
            case Token::Kind::func: {
                UnaryFunc f = tok_.func;
                std::size_t name_offset = tok_.offset;
                advance();
                if (tok_.kind != Token::Kind::lparen) {
                    throw ParseError(std::string("expected '(' after function '") +
                                         function_name(f) + "'",
                                     name_offset);
                }
                advance();
                std::uint32_t arg = parse_expr(depth + 1);
                if (tok_.kind != Token::Kind::rparen) {
                    fail(std::string("function '") + function_name(f) +
                         "' takes exactly one argument; expected ')'");
                }
                advance();
                ExprNode n;
                n.kind = ExprNode::Kind::unary;
                n.func = f;
                n.lhs = arg;
                return add(n);
            }
            case Token::Kind::lparen: {
                advance();
                std::uint32_t inner = parse_expr(depth + 1);
                if (tok_.kind != Token::Kind::rparen) {
                    fail("expected ')'");
                }
                advance();
                return inner;
            }
            case Token::Kind::end:
                fail("unexpected end of input");
            default:
                fail("expected a number, variable, function, or '('");
        }
    }

    void check_depth(int depth) const {
        if (depth > k_max_depth) {
            throw ParseError("expression nested too deeply", tok_.offset);
        }
    }

    Lexer lexer_;
    Token tok_;
    std::vector<ExprNode> nodes_;
    int max_var_limit_ = 0;
    int max_var_seen_ = 0;
};

Expression Expression::parse(std::string_view source, int max_var) {
    bool all_space = true;
    for (char c : source) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            all_space = false;
            break;
        }
    }
    if (source.empty() || all_space) {
        throw ParseError("empty expression", 0);
    }
    return ExprParser(source, max_var).run();
}

namespace {

template <typename Num>
Num apply_unary(UnaryFunc f, Num a) {
    using lyapcert::abs;
    using lyapcert::ln;
    using lyapcert::sech;
    using std::abs;
    using std::cos;
    using std::exp;
    using std::sin;
    using std::sqrt;
    using std::tan;
    using std::tanh;
    switch (f) {
        case UnaryFunc::neg: return -a;
        case UnaryFunc::sin: return sin(a);
        case UnaryFunc::cos: return cos(a);
        case UnaryFunc::tan: return tan(a);
        case UnaryFunc::tanh: return tanh(a);
        case UnaryFunc::sech: return sech(a);
        case UnaryFunc::exp: return exp(a);
        case UnaryFunc::ln: return ln(a);
        case UnaryFunc::abs: return abs(a);
        case UnaryFunc::sqrt: return sqrt(a);
    }
    throw EvalError("unreachable unary function");
}

double apply_binary(BinaryOp op, double a, double b) {
    switch (op) {
        case BinaryOp::add: return a + b;
        case BinaryOp::sub: return a - b;
        case BinaryOp::mul: return a * b;
        case BinaryOp::div: return a / b;
        case BinaryOp::pow: return pow_checked(a, b);
    }
    throw EvalError("unreachable binary op");
}

Dual apply_binary(BinaryOp op, Dual a, Dual b) {
    switch (op) {
        case BinaryOp::add: return a + b;
        case BinaryOp::sub: return a - b;
        case BinaryOp::mul: return a * b;
        case BinaryOp::div: return a / b;
        case BinaryOp::pow: return pow(a, b);
    }
    throw EvalError("unreachable binary op");
}

template <typename Num, typename VarFn>
Num eval_arena(const std::vector<ExprNode>& nodes, VarFn&& var_value) {
    thread_local std::vector<Num> values;
    values.clear();
    values.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const ExprNode& n = nodes[i];
        switch (n.kind) {
            case ExprNode::Kind::constant: values[i] = Num(n.value); break;
            case ExprNode::Kind::variable: values[i] = var_value(n.var); break;
            case ExprNode::Kind::unary: values[i] = apply_unary(n.func, values[n.lhs]); break;
            case ExprNode::Kind::binary:
                values[i] = apply_binary(n.op, values[n.lhs], values[n.rhs]);
                break;
        }
    }
    return values.back();
}

void check_dimension(int max_var, std::size_t point_dim) {
    if (static_cast<std::size_t>(max_var) > point_dim) {
        throw EvalError("point has dimension " + std::to_string(point_dim) +
                        " but expression references x" + std::to_string(max_var));
    }
}

} // namespace

double Expression::eval(std::span<const double> point) const {
    check_dimension(max_var_, point.size());
    double r = eval_arena<double>(nodes_, [&](int var) { return point[var - 1]; });
    if (!std::isfinite(r)) {
        throw EvalError("expression evaluated to a non-finite value");
    }
    return r;
}

Dual Expression::eval_dual(std::span<const double> point, int seed_var) const {
    check_dimension(max_var_, point.size());
    if (seed_var < 1 || static_cast<std::size_t>(seed_var) > point.size()) {
        throw EvalError("derivative seed x" + std::to_string(seed_var) +
                        " is outside the point dimension");
    }
    Dual r = eval_arena<Dual>(nodes_, [&](int var) {
        return Dual(point[var - 1], var == seed_var ? 1.0 : 0.0);
    });
    if (!std::isfinite(r.val) || !std::isfinite(r.der)) {
        throw EvalError("expression derivative evaluated to a non-finite value");
    }
    return r;
}

namespace {

// precedence levels used by the printer; parentheses are inserted exactly
// where re-parsing would otherwise change the tree shape
int node_level(const ExprNode& n) {
    switch (n.kind) {
        case ExprNode::Kind::constant:
        case ExprNode::Kind::variable:
            return 5;
        case ExprNode::Kind::unary:
            return n.func == UnaryFunc::neg ? 3 : 5;
        case ExprNode::Kind::binary:
            switch (n.op) {
                case BinaryOp::add:
                case BinaryOp::sub: return 1;
                case BinaryOp::mul:
                case BinaryOp::div: return 2;
                case BinaryOp::pow: return 4;
            }
    }
    return 5;
}

void print_node(const std::vector<ExprNode>& nodes, std::uint32_t idx, std::string& out) {
    const ExprNode& n = nodes[idx];
    auto child = [&](std::uint32_t c, bool parens) {
        if (parens) out.push_back('(');
        print_node(nodes, c, out);
        if (parens) out.push_back(')');
    };
    switch (n.kind) {
        case ExprNode::Kind::constant:
            out += format_double(n.value);
            return;
        case ExprNode::Kind::variable:
            out += "x" + std::to_string(n.var);
            return;
        case ExprNode::Kind::unary:
            if (n.func == UnaryFunc::neg) {
                out.push_back('-');
                child(n.lhs, node_level(nodes[n.lhs]) < 3);
            } else {
                out += function_name(n.func);
                out.push_back('(');
                print_node(nodes, n.lhs, out);
                out.push_back(')');
            }
            return;
        case ExprNode::Kind::binary: {
            const int lvl = node_level(n);
            const char* op = "?";
            switch (n.op) {
                case BinaryOp::add: op = " + "; break;
                case BinaryOp::sub: op = " - "; break;
                case BinaryOp::mul: op = "*"; break;
                case BinaryOp::div: op = "/"; break;
                case BinaryOp::pow: op = "^"; break;
            }
            if (n.op == BinaryOp::pow) {
                // right-associative: parenthesize a compound base
                child(n.lhs, node_level(nodes[n.lhs]) <= lvl);
                out += op;
                child(n.rhs, node_level(nodes[n.rhs]) < lvl);
            } else {
                child(n.lhs, node_level(nodes[n.lhs]) < lvl);
                out += op;
                child(n.rhs, node_level(nodes[n.rhs]) <= lvl);
            }
            return;
        }
    }
}

} // namespace

std::string Expression::str() const {
    std::string out;
    print_node(nodes_, static_cast<std::uint32_t>(nodes_.size() - 1), out);
    return out;
}

bool Expression::same_structure(const Expression& other) const noexcept {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const ExprNode& a = nodes_[i];
        const ExprNode& b = other.nodes_[i];
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case ExprNode::Kind::constant:
                if (a.value != b.value) return false;
                break;
            case ExprNode::Kind::variable:
                if (a.var != b.var) return false;
                break;
            case ExprNode::Kind::unary:
                if (a.func != b.func || a.lhs != b.lhs) return false;
                break;
            case ExprNode::Kind::binary:
                if (a.op != b.op || a.lhs != b.lhs || a.rhs != b.rhs) return false;
                break;
        }
    }
    return true;
}

std::string format_double(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace lyapcert
