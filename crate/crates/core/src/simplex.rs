//! Nelder–Mead simplex minimisation in unconstrained coordinates.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    /// Largest vertex distance from the best vertex, per coordinate.
    pub x_tol: f64,
    /// Relative spread of objective values across the simplex.
    pub f_tol: f64,
    /// Absolute floor on the objective spread, for minima at zero.
    pub f_abs_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 2000,
            x_tol: 1e-3,
            f_tol: 1e-6,
            f_abs_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

fn lerp(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimises `objective` starting from `start` with initial edge lengths
/// `steps`. Non-finite objective values are treated as +∞.
pub fn minimize<F>(mut objective: F, start: &[f64], steps: &[f64], options: SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = start.len();
    assert_eq!(steps.len(), n, "one step per coordinate");
    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = objective(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut vertices: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(start, &mut evaluations);
    vertices.push((start.to_vec(), v0));
    for i in 0..n {
        let mut x = start.to_vec();
        x[i] += steps[i];
        let v = eval(&x, &mut evaluations);
        vertices.push((x, v));
    }

    loop {
        vertices.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = vertices[0].1;
        let worst = vertices[n].1;

        let diameter = vertices[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&vertices[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = worst - best;
        if diameter < options.x_tol
            && spread.is_finite()
            && spread <= options.f_tol * best.abs() + options.f_abs_tol
        {
            return SimplexResult {
                x: vertices[0].0.clone(),
                value: best,
                evaluations,
                converged: true,
            };
        }
        if evaluations >= options.max_evaluations {
            return SimplexResult {
                x: vertices[0].0.clone(),
                value: best,
                evaluations,
                converged: false,
            };
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| vertices[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let worst_x = vertices[n].0.clone();

        let reflected = lerp(&centroid, &worst_x, -REFLECT);
        let fr = eval(&reflected, &mut evaluations);

        if fr < best {
            let expanded = lerp(&centroid, &worst_x, -EXPAND);
            let fe = eval(&expanded, &mut evaluations);
            vertices[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
            continue;
        }
        if fr < vertices[n - 1].1 {
            vertices[n] = (reflected, fr);
            continue;
        }

        // Contraction, outside if the reflection improved on the worst.
        let (contracted, fc) = if fr < worst {
            let x = lerp(&centroid, &reflected, CONTRACT);
            let v = eval(&x, &mut evaluations);
            (x, v)
        } else {
            let x = lerp(&centroid, &worst_x, CONTRACT);
            let v = eval(&x, &mut evaluations);
            (x, v)
        };
        if fc < worst.min(fr) {
            vertices[n] = (contracted, fc);
            continue;
        }

        let anchor = vertices[0].0.clone();
        for vertex in vertices.iter_mut().skip(1) {
            let x = lerp(&anchor, &vertex.0, SHRINK);
            let v = eval(&x, &mut evaluations);
            *vertex = (x, v);
        }
    }
}
