#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vlasov/lie_poisson.hpp"

namespace vlasov {

// Interaction potential for the float-mode dynamics. Even by construction, so
// the gradient is odd and the grad W(0) = 0 convention holds automatically;
// the self-interaction term in force sums is skipped explicitly anyway.
class Potential {
public:
    enum class Kind { Zero, Polynomial, Gaussian };

    static Potential zero(int d) {
        Potential w;
        w.kind_ = Kind::Zero;
        w.d_ = d;
        return w;
    }

    static Potential polynomial(PolynomialPotential p) {
        Potential w;
        w.kind_ = Kind::Polynomial;
        w.d_ = p.d();
        w.poly_ = std::move(p);
        return w;
    }

    static Potential gaussian(int d, double amplitude, double width) {
        if (width <= 0) throw std::invalid_argument("gaussian potential needs positive width");
        Potential w;
        w.kind_ = Kind::Gaussian;
        w.d_ = d;
        w.amplitude_ = amplitude;
        w.width_ = width;
        return w;
    }

    Kind kind() const { return kind_; }
    int d() const { return d_; }
    bool is_zero() const { return kind_ == Kind::Zero; }
    const PolynomialPotential& poly() const {
        if (kind_ != Kind::Polynomial) throw std::logic_error("potential is not polynomial");
        return *poly_;
    }

    double operator()(const std::vector<double>& u) const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Polynomial: return (*poly_)(u);
            case Kind::Gaussian: {
                double q = 0.0;
                for (double c : u) q += c * c;
                return amplitude_ * std::exp(-q / (2.0 * width_ * width_));
            }
        }
        return 0.0;
    }

    // grad W(u); exactly zero at the origin.
    void gradient(const std::vector<double>& u, std::vector<double>& out) const {
        out.assign(static_cast<std::size_t>(d_), 0.0);
        bool at_origin = true;
        for (double c : u) {
            if (c != 0.0) at_origin = false;
        }
        if (at_origin || kind_ == Kind::Zero) return;
        switch (kind_) {
            case Kind::Polynomial: {
                for (int c = 0; c < d_; ++c) out[static_cast<std::size_t>(c)] = eval_poly_derivative(u, c);
                return;
            }
            case Kind::Gaussian: {
                double q = 0.0;
                for (double c : u) q += c * c;
                const double s = -amplitude_ * std::exp(-q / (2.0 * width_ * width_)) / (width_ * width_);
                for (int c = 0; c < d_; ++c) out[static_cast<std::size_t>(c)] = s * u[static_cast<std::size_t>(c)];
                return;
            }
            default: return;
        }
    }

    double value_at_zero() const {
        switch (kind_) {
            case Kind::Zero: return 0.0;
            case Kind::Polynomial: return to_double(poly_->at_zero());
            case Kind::Gaussian: return amplitude_;
        }
        return 0.0;
    }

private:
    double eval_poly_derivative(const std::vector<double>& u, int c) const {
        const Polynomial dp = poly_->displacement_poly().derivative(c);
        return dp.evaluate<double>(u);
    }

    Kind kind_ = Kind::Zero;
    int d_ = 1;
    std::optional<PolynomialPotential> poly_;
    double amplitude_ = 0.0;
    double width_ = 1.0;
};

}  // namespace vlasov
