//! Named example geometries used by tests, the scenario gallery and benches.

use crate::error::Error;
use crate::expr::{Chart, Expr};
use crate::tensor::{Form, Multivector, Tensor11, VectorField};
use crate::Result;

/// Chart `(x, y, z)`.
pub fn chart_r3() -> Chart {
    Chart::new("r3", &["x", "y", "z"]).expect("static chart")
}

/// Chart `(x1, y1, x2, y2)`, the real coordinates of the complex plane pair.
pub fn chart_r4() -> Chart {
    Chart::new("r4", &["x1", "y1", "x2", "y2"]).expect("static chart")
}

/// Standard complex structure on a chart ordered `(x1, y1, …, xk, yk)`:
/// `j ∂x_i = ∂y_i`, `j ∂y_i = −∂x_i`.
pub fn standard_j(chart: &Chart) -> Result<Tensor11> {
    let n = chart.dim();
    if n % 2 != 0 {
        return Err(Error::DegreeOutOfRange { degree: n, dim: n });
    }
    let mut matrix = vec![vec![Expr::zero(); n]; n];
    for b in 0..n / 2 {
        matrix[2 * b + 1][2 * b] = Expr::one();
        matrix[2 * b][2 * b + 1] = Expr::int(-1);
    }
    Tensor11::new(chart.clone(), matrix)
}

/// The linear `so(3)^*` bivector `z ∂x∧∂y + x ∂y∧∂z + y ∂z∧∂x` on a
/// three-dimensional chart.
pub fn so3_poisson(chart: &Chart) -> Result<Multivector> {
    if chart.dim() != 3 {
        return Err(Error::DegreeOutOfRange {
            degree: 2,
            dim: chart.dim(),
        });
    }
    let mut p = Multivector::zero(chart.clone(), 2)?;
    p.set(&[0, 1], chart.coord(2))?;
    p.set(&[1, 2], chart.coord(0))?;
    p.set(&[0, 2], -&chart.coord(1))?;
    Ok(p)
}

/// Radial Euler field `Σ x_i ∂_i`.
pub fn euler_field(chart: &Chart) -> Result<VectorField> {
    VectorField::new(
        chart.clone(),
        (0..chart.dim()).map(|i| chart.coord(i)).collect(),
    )
}

/// The contact form `dz − y dx` on a chart ordered `(x, y, z)`.
pub fn contact_theta_r3(chart: &Chart) -> Result<Form> {
    let mut theta = Form::zero(chart.clone(), 1)?;
    theta.set(&[2], Expr::one())?;
    theta.set(&[0], -&chart.coord(1))?;
    Ok(theta)
}

/// Constant holomorphic-model bivector `¼(∂x₁∧∂x₂ − ∂y₁∧∂y₂)` on the
/// chart `(x1, y1, x2, y2)`.
pub fn c2_model_bivector(chart: &Chart) -> Result<Multivector> {
    let mut pi = Multivector::zero(chart.clone(), 2)?;
    pi.set(&[chart.var_index("x1")?, chart.var_index("x2")?], Expr::rat(1, 4))?;
    pi.set(&[chart.var_index("y1")?, chart.var_index("y2")?], Expr::rat(-1, 4))?;
    Ok(pi)
}

/// The Jacobi pair `(Λ, E)` of the contact form `dz − y dx` on `(x, y, z)`:
/// `Λ = ∂x∧∂y − y ∂y∧∂z` and `E = ∂z` (the Reeb field).
pub fn contact_r3_jacobi(chart: &Chart) -> Result<crate::atiyah::Multiderivation> {
    let mut lam = Multivector::zero(chart.clone(), 2)?;
    lam.set(&[0, 1], Expr::one())?;
    lam.set(&[1, 2], -&chart.coord(1))?;
    let e = VectorField::coordinate(chart.clone(), 2);
    crate::atiyah::Multiderivation::jacobi_pair(lam, e)
}

/// Canonical symplectic form `Σ dx_i ∧ dy_i` on a chart ordered
/// `(x1, y1, …, xk, yk)`.
pub fn canonical_symplectic(chart: &Chart) -> Result<Form> {
    let n = chart.dim();
    if n % 2 != 0 {
        return Err(Error::DegreeOutOfRange { degree: 2, dim: n });
    }
    let mut omega = Form::zero(chart.clone(), 2)?;
    for b in 0..n / 2 {
        omega.set(&[2 * b, 2 * b + 1], Expr::one())?;
    }
    Ok(omega)
}

/// `dx₁∧dx₂ − dy₁∧dy₂` on the chart `(x1, y1, x2, y2)`: the inverse body of
/// the holomorphic model.
pub fn c2_model_symplectic(chart: &Chart) -> Result<Form> {
    let mut omega = Form::zero(chart.clone(), 2)?;
    omega.set(&[chart.var_index("x1")?, chart.var_index("x2")?], Expr::one())?;
    omega.set(&[chart.var_index("y1")?, chart.var_index("y2")?], Expr::int(-1))?;
    Ok(omega)
}
