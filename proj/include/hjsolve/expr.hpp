#pragma once

// Tiny expression evaluator for user-defined problems. Supports
// + - * / ^, unary minus, parentheses, the variables x, y, t, u, v,
// the constant pi, and the functions sin cos tan abs sign exp sqrt.

#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjsolve::expr {

struct Env {
    double x = 0, y = 0, t = 0, u = 0, v = 0;
};

class Node {
public:
    virtual ~Node() = default;
    virtual double eval(const Env& e) const = 0;
};

using NodePtr = std::unique_ptr<Node>;

namespace detail {

struct Const : Node {
    double value;
    explicit Const(double v) : value(v) {}
    double eval(const Env&) const override { return value; }
};

struct Var : Node {
    char name;
    explicit Var(char n) : name(n) {}
    double eval(const Env& e) const override {
        switch (name) {
            case 'x': return e.x;
            case 'y': return e.y;
            case 't': return e.t;
            case 'u': return e.u;
            case 'v': return e.v;
        }
        return 0.0;
    }
};

struct Unary : Node {
    double (*fn)(double);
    NodePtr arg;
    Unary(double (*f)(double), NodePtr a) : fn(f), arg(std::move(a)) {}
    double eval(const Env& e) const override { return fn(arg->eval(e)); }
};

struct Binary : Node {
    char op;
    NodePtr lhs, rhs;
    Binary(char o, NodePtr l, NodePtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
    double eval(const Env& e) const override {
        const double a = lhs->eval(e), b = rhs->eval(e);
        switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            case '^': return std::pow(a, b);
        }
        return 0.0;
    }
};

inline double sign_fn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

class Parser {
public:
    explicit Parser(const std::string& s) : src_(s) {}

    NodePtr parse() {
        NodePtr n = sum();
        skip_ws();
        if (pos_ != src_.size())
            fail("unexpected trailing input");
        return n;
    }

private:
    const std::string& src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("expression error at position " +
                                    std::to_string(pos_) + ": " + msg);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr sum() {
        NodePtr n = product();
        for (;;) {
            if (consume('+')) n = std::make_unique<Binary>('+', std::move(n), product());
            else if (consume('-')) n = std::make_unique<Binary>('-', std::move(n), product());
            else return n;
        }
    }

    NodePtr product() {
        NodePtr n = unary();
        for (;;) {
            if (consume('*')) n = std::make_unique<Binary>('*', std::move(n), unary());
            else if (consume('/')) n = std::make_unique<Binary>('/', std::move(n), unary());
            else return n;
        }
    }

    NodePtr unary() {
        if (consume('-'))
            return std::make_unique<Binary>('-', std::make_unique<Const>(0.0), unary());
        consume('+');
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (consume('^'))
            return std::make_unique<Binary>('^', std::move(base), unary());
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr n = sum();
            if (!consume(')')) fail("missing ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        std::size_t len = 0;
        double v = std::stod(src_.substr(pos_), &len);
        pos_ += len;
        return std::make_unique<Const>(v);
    }

    NodePtr ident() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (name == "pi") return std::make_unique<Const>(M_PI);
        if (name.size() == 1 && std::string("xytuv").find(name[0]) != std::string::npos)
            return std::make_unique<Var>(name[0]);

        static const struct { const char* name; double (*fn)(double); } fns[] = {
            {"sin", std::sin}, {"cos", std::cos}, {"tan", std::tan},
            {"abs", std::fabs}, {"sign", sign_fn}, {"exp", std::exp},
            {"sqrt", std::sqrt},
        };
        for (const auto& f : fns) {
            if (name == f.name) {
                if (!consume('(')) fail("expected '(' after function name");
                NodePtr arg = sum();
                if (!consume(')')) fail("missing ')'");
                return std::make_unique<Unary>(f.fn, std::move(arg));
            }
        }
        fail("unknown identifier '" + name + "'");
    }
};

}  // namespace detail

/// Compiled expression; evaluation is re-entrant.
class Expression {
public:
    Expression() = default;
    explicit Expression(const std::string& text)
        : root_(detail::Parser(text).parse()), text_(text) {}

    double operator()(const Env& e) const { return root_->eval(e); }
    bool valid() const { return root_ != nullptr; }
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace hjsolve::expr
