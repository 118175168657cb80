// Template definitions for ast.hpp. Not meant to be included directly.
#pragma once

#include <type_traits>

namespace remodyc {

namespace detail {

template <class F>
void forEachChild(const Expression& e, F&& f) {
    std::visit(
        [&](const auto& n) {
            using N = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<N, Arithmetics> || std::is_same_v<N, Apply>) {
                for (const auto& a : n.args) f(a);
            } else if constexpr (std::is_same_v<N, UniformDist>) {
                f(*n.low);
                f(*n.high);
            } else if constexpr (std::is_same_v<N, NormalDist>) {
                f(*n.mean);
                f(*n.sigma);
            } else if constexpr (std::is_same_v<N, GammaDist>) {
                f(*n.shape);
                f(*n.scale);
            } else if constexpr (std::is_same_v<N, LogLogisticDist>) {
                f(*n.scaleParam);
                f(*n.shapeParam);
            } else if constexpr (std::is_same_v<N, EnUnit> || std::is_same_v<N, DeUnit>) {
                f(*n.expr);
            }
        },
        e.node);
}

template <class F>
void transformChildren(Expression& e, F& f) {
    std::visit(
        [&](auto& n) {
            using N = std::decay_t<decltype(n)>;
            auto fix = [&](Expression& child) { child = transform(std::move(child), f); };
            if constexpr (std::is_same_v<N, Arithmetics> || std::is_same_v<N, Apply>) {
                for (auto& a : n.args) fix(a);
            } else if constexpr (std::is_same_v<N, UniformDist>) {
                fix(*n.low);
                fix(*n.high);
            } else if constexpr (std::is_same_v<N, NormalDist>) {
                fix(*n.mean);
                fix(*n.sigma);
            } else if constexpr (std::is_same_v<N, GammaDist>) {
                fix(*n.shape);
                fix(*n.scale);
            } else if constexpr (std::is_same_v<N, LogLogisticDist>) {
                fix(*n.scaleParam);
                fix(*n.shapeParam);
            } else if constexpr (std::is_same_v<N, EnUnit> || std::is_same_v<N, DeUnit>) {
                fix(*n.expr);
            }
        },
        e.node);
}

}  // namespace detail

template <class F>
void forEachNode(const Expression& e, F&& f) {
    f(e);
    detail::forEachChild(e, [&](const Expression& child) { forEachNode(child, f); });
}

template <class F>
void forEachExpression(const ActionDefinition& a, F&& f) {
    for (const auto& d : a.definitions) f(d.expression);
    for (const auto& u : a.utilities) f(u.expression);
    for (const auto& l : a.lifecycle) {
        std::visit(
            [&](const auto& d) {
                using D = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<D, Spawn>) {
                    f(d.count);
                    if (d.guard) {
                        f(d.guard->left);
                        f(d.guard->right);
                    }
                } else {
                    f(d.guard.left);
                    f(d.guard.right);
                }
            },
            l.directive);
    }
}

template <class F>
Expression transform(Expression e, F&& f) {
    detail::transformChildren(e, f);
    return f(std::move(e));
}

}  // namespace remodyc
