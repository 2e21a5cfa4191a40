#pragma once

#include <cmath>
#include <string>

#include "onb/common.hpp"

namespace onb {

enum class Activation { ReLU, Tanh, Identity };

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
        case Activation::Identity: return z;
    }
    return z;
}

// Derivative from the pre-activation. ReLU uses subgradient 0 at z == 0.
inline double activate_grad(Activation a, double z) {
    switch (a) {
        case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

inline Matrix activate(Activation a, const Matrix& z) {
    if (a == Activation::Identity) return z;
    return z.unaryExpr([a](double v) { return activate(a, v); });
}

inline std::string to_string(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

inline Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::ReLU;
    if (s == "tanh") return Activation::Tanh;
    if (s == "identity") return Activation::Identity;
    throw Error("unknown activation: " + s);
}

}  // namespace onb
