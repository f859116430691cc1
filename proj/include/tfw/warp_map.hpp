#pragma once
// Periodic-wise piecewise smooth warping maps w with w(x+k) = w(x) + k.

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace tfw {

enum class Side { left, right, two_sided };

struct MapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed-form analytic formula of one piece; jets are exact, not finite differences.
class PieceShape {
public:
    virtual ~PieceShape() = default;
    // D^0..D^order of the formula at x (x may sit on either end of the piece)
    virtual std::vector<double> jet(double x, int order) const = 0;
    virtual double value(double x) const { return jet(x, 0)[0]; }
};

struct MapPiece {
    double x0 = 0.0;
    double x1 = 1.0;
    std::shared_ptr<const PieceShape> shape;
};

struct Singularity {
    double xi = 0.0;
    int sigma = 0;  // highest order whose one-sided jets agree
    double dw_right = 1.0;
    double dw_left = 1.0;
};

struct MapDiagnostics {
    int sigma = 0;
    bool sigma_capped = false;
    std::vector<Singularity> singularities;
    double min_dw = 1.0;
    double max_dw = 1.0;
};

class WarpMap {
public:
    static constexpr int kMaxTestedOrder = 16;

    WarpMap(std::string name, std::vector<MapPiece> pieces, nlohmann::json source = nlohmann::json::object());

    static WarpMap identity();
    static WarpMap exponential(double base = 2.0);
    static WarpMap atan_tan(double nu);
    static WarpMap c1_seam(double c = 0.5);
    static WarpMap periodic_spline(const std::vector<std::pair<double, double>>& knots);
    static WarpMap smoothed_linear(const std::vector<std::pair<double, double>>& knots, double halfwidth);
    static WarpMap from_json(const nlohmann::json& j);

    const std::string& name() const { return name_; }
    const nlohmann::json& source() const { return source_; }
    const std::vector<MapPiece>& pieces() const { return pieces_; }
    const MapDiagnostics& diagnostics() const { return diag_; }
    int sigma() const { return diag_.sigma; }
    const std::vector<Singularity>& singularities() const { return diag_.singularities; }
    double max_dw() const { return diag_.max_dw; }
    double min_dw() const { return diag_.min_dw; }

    double eval(double x) const;
    double derivative(double x, int order, Side side = Side::two_sided) const;
    // D^0..D^order at x; D^0 is the periodic-wise value
    std::vector<double> jet(double x, int order, Side side) const;

    // (Dw(x))^b, with the mean of the one-sided values on a singular point
    double sample_weight(double x, double b) const;
    const Singularity* singular_at(double x, double tol = 1e-13) const;

private:
    std::string name_;
    std::vector<MapPiece> pieces_;
    nlohmann::json source_;
    MapDiagnostics diag_;

    std::vector<double> raw_jet(double f, int order, Side side, int* piece_used) const;
    void validate_and_analyse();
};

// Re-runs the validation on an existing map.
MapDiagnostics validate(const WarpMap& map);

// v = w^{-1}, solved by bracketed Newton on a grid cached at construction.
class InverseMap {
public:
    explicit InverseMap(std::shared_ptr<const WarpMap> map, int grid = 1024);

    double eval(double y) const;
    double derivative(double y) const;
    // (Dv(y))^b with one-sided mean on images of singularities
    double sample_weight(double y, double b) const;
    const WarpMap& map() const { return *map_; }

    static constexpr double kTolerance = 1e-14;

private:
    std::shared_ptr<const WarpMap> map_;
    std::vector<double> xs_;
    std::vector<double> ys_;
};

}  // namespace tfw
