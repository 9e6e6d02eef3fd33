#pragma once

#include "contactflow/fields.hpp"

namespace contactflow {

/// Exterior derivative of a form field at x. Central finite differences of
/// the stored coefficients, antisymmetrized; O(step^2) unless the field
/// carries an analytic derivative callback. Throws when x sits closer than
/// one step to the field's domain boundary.
KForm exterior_derivative(const FormField& F, const Vector& x, const DiffOptions& opts = {});

/// Lie derivative via Cartan's formula L_X F = i_X dF + d(i_X F).
KForm lie_derivative(const VectorField& X, const FormField& F, const Vector& x,
                     const DiffOptions& opts = {});

/// Pullback of the k-form w, given at map(x), to the source chart at x.
/// The Jacobian is the map's analytic one when present, else central
/// differences with the given step.
KForm pullback(const PointMap& map, const KForm& w, const Vector& x,
               const DiffOptions& opts = {});

/// Pullback of a whole form field: (map* W)(x) = pullback(map, W(map(x)), x).
FormField pullback_field(const PointMap& map, const FormField& W);

/// Form field wrapping x -> exterior_derivative(F, x).
FormField derivative_field(const FormField& F, const DiffOptions& opts = {});

}  // namespace contactflow
