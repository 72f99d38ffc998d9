//! Derivative-free minimisation by the Nelder-Mead simplex method.
//!
//! Standard coefficients (reflection 1, expansion 2, contraction 0.5,
//! shrink 0.5), deterministic tie-breaking in the vertex ordering, and a
//! two-part convergence test: the simplex diameter (infinity norm about
//! the best vertex) and the spread of function values must both fall under
//! their tolerances. Objective values that are not finite are treated as
//! +infinity, which lets callers express domain constraints as penalties.

/// Outcome of a simplex minimisation.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    /// Best vertex found.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub fmin: f64,
    /// Main-loop iterations performed.
    pub iterations: usize,
    /// True when both the diameter and spread tolerances were met.
    pub converged: bool,
    /// Final simplex diameter about the best vertex.
    pub final_diameter: f64,
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

/// Minimises `f` starting from `x0`, with an initial simplex offset of
/// `step` along each coordinate.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_iter: usize,
    x_tol: f64,
    f_tol: f64,
) -> NelderMeadResult {
    let dim = x0.len();
    assert!(dim > 0, "cannot optimise a zero-dimensional objective");
    let mut eval = |x: &[f64]| -> f64 {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    // Initial simplex: x0 and one step along each axis.
    let mut verts: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim + 1);
    let f0 = eval(x0);
    verts.push((f0, x0.to_vec()));
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += step;
        let fv = eval(&v);
        verts.push((fv, v));
    }

    let diameter = |verts: &[(f64, Vec<f64>)]| -> f64 {
        let best = &verts[0].1;
        verts[1..]
            .iter()
            .map(|(_, v)| {
                v.iter()
                    .zip(best)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max)
            })
            .fold(0.0f64, f64::max)
    };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // Stable sort keeps insertion order on ties, so runs are
        // reproducible bit for bit.
        verts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let diam = diameter(&verts);
        let spread = verts[dim].0 - verts[0].0;
        if diam <= x_tol && spread <= f_tol {
            converged = true;
            break;
        }
        iterations += 1;

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0f64; dim];
        for (_, v) in verts.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let worst = verts[dim].clone();
        let mk = |coef: f64, centroid: &[f64], other: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(other)
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let xr = mk(ALPHA, &centroid, &worst.1);
        let fr = eval(&xr);
        if fr < verts[0].0 {
            // Try to expand further along the same direction.
            let xe = mk(GAMMA, &centroid, &worst.1);
            let fe = eval(&xe);
            verts[dim] = if fe < fr { (fe, xe) } else { (fr, xr) };
        } else if fr < verts[dim - 1].0 {
            verts[dim] = (fr, xr);
        } else {
            let (fc, xc) = if fr < worst.0 {
                // Outside contraction, between the reflection and centroid.
                let xc = mk(RHO * ALPHA, &centroid, &worst.1);
                (eval(&xc), xc)
            } else {
                // Inside contraction, toward the worst vertex.
                let xc = mk(-RHO, &centroid, &worst.1);
                (eval(&xc), xc)
            };
            if fc < fr.min(worst.0) {
                verts[dim] = (fc, xc);
            } else {
                // Shrink everything toward the best vertex.
                let best = verts[0].1.clone();
                for (fv, v) in verts.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best) {
                        *x = b + SIGMA * (*x - b);
                    }
                    *fv = eval(v);
                }
            }
        }
    }
    verts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let final_diameter = diameter(&verts);
    let (fmin, x) = verts.swap_remove(0);
    NelderMeadResult {
        x,
        fmin,
        iterations,
        converged,
        final_diameter,
    }
}
