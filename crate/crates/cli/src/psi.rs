//! Samples of the map `(x_1, x_2) ↦ (⟨f_1, σ⟩, ⟨f_2, σ⟩)` on the triangle
//! `0 ≤ x_1 ≤ x_2 ≤ 1`, with SVG rendering.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use switchfn::{pair_exact, IntegrableFunction, Sign, SwitchFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `(0, x)`
    Left,
    /// `(x, 1)`
    Top,
    /// `(x, x)`
    Diagonal,
}

impl Edge {
    pub fn name(self) -> &'static str {
        match self {
            Edge::Left => "left",
            Edge::Top => "top",
            Edge::Diagonal => "diagonal",
        }
    }

    fn at(self, x: f64) -> (f64, f64) {
        match self {
            Edge::Left => (0.0, x),
            Edge::Top => (x, 1.0),
            Edge::Diagonal => (x, x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub x1: f64,
    pub x2: f64,
    pub psi: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct PsiScan {
    pub grid: usize,
    /// Row-major over `i ≤ j`, `x_1 = i/grid`, `x_2 = j/grid`.
    pub interior: Vec<Sample>,
    pub boundary: Vec<(Edge, Vec<Sample>)>,
    /// `(λ, λ∫f_1, λ∫f_2)` for `λ ∈ [-1, 1]`.
    pub lambda_line: Vec<(f64, f64, f64)>,
    /// `λ(∫f_1, ∫f_2)` for a requested `λ`.
    pub target: Option<(f64, f64)>,
}

pub fn psi(f1: &IntegrableFunction, f2: &IntegrableFunction, x1: f64, x2: f64) -> Result<(f64, f64)> {
    let s = SwitchFunction::new(vec![x1, x2], Sign::Plus)?;
    Ok((pair_exact(&s, f1)?, pair_exact(&s, f2)?))
}

pub fn psi_scan(fs: &[IntegrableFunction], grid: usize, lambda: Option<f64>) -> Result<PsiScan> {
    let [f1, f2] = fs else {
        bail!("psi-scan needs exactly 2 functions, got {}", fs.len());
    };
    if grid < 2 {
        bail!("grid must be at least 2, got {grid}");
    }
    let g = grid as f64;
    let sample = |x1: f64, x2: f64| -> Result<Sample> {
        Ok(Sample {
            x1,
            x2,
            psi: psi(f1, f2, x1, x2)?,
        })
    };
    let mut interior = Vec::new();
    for i in 0..=grid {
        for j in i..=grid {
            interior.push(sample(i as f64 / g, j as f64 / g)?);
        }
    }
    let boundary = [Edge::Left, Edge::Top, Edge::Diagonal]
        .into_iter()
        .map(|edge| {
            let pts = (0..=grid)
                .map(|s| {
                    let (x1, x2) = edge.at(s as f64 / g);
                    sample(x1, x2)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((edge, pts))
        })
        .collect::<Result<Vec<_>>>()?;
    let (t1, t2) = (f1.total(1e-13)?, f2.total(1e-13)?);
    let lambda_line = (0..=grid)
        .map(|s| {
            let l = -1.0 + 2.0 * s as f64 / g;
            (l, l * t1, l * t2)
        })
        .collect();
    Ok(PsiScan {
        grid,
        interior,
        boundary,
        lambda_line,
        target: lambda.map(|l| (l * t1, l * t2)),
    })
}

impl PsiScan {
    fn at(&self, i: usize, j: usize) -> (f64, f64) {
        // Row i holds j = i..=grid.
        let n = self.grid + 1;
        let offset = i * n - i * i.saturating_sub(1) / 2;
        self.interior[offset + (j - i)].psi
    }

    /// Mesh triangles of the sampled image.
    pub fn triangles(&self) -> Vec<[(f64, f64); 3]> {
        let mut out = Vec::new();
        for i in 0..self.grid {
            for j in i..self.grid {
                // Lower triangle (i,j), (i,j+1), (i+1,j+1) exists whenever i ≤ j.
                out.push([self.at(i, j), self.at(i, j + 1), self.at(i + 1, j + 1)]);
                if i < j {
                    out.push([self.at(i, j), self.at(i + 1, j), self.at(i + 1, j + 1)]);
                }
            }
        }
        out
    }

    /// Whether `p` lies in some mesh triangle of the sampled image.
    pub fn covers(&self, p: (f64, f64)) -> bool {
        self.triangles().iter().any(|t| in_triangle(p, t))
    }

    pub fn to_svg(&self) -> String {
        let mut all: Vec<(f64, f64)> = self.interior.iter().map(|s| s.psi).collect();
        all.extend(self.lambda_line.iter().map(|&(_, a, b)| (a, b)));
        all.extend(self.target);
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in &all {
            lo_x = lo_x.min(x);
            hi_x = hi_x.max(x);
            lo_y = lo_y.min(y);
            hi_y = hi_y.max(y);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-12);
        let (cx, cy) = (0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y));
        let map = |(x, y): (f64, f64)| (300.0 + 540.0 * (x - cx) / span, 300.0 - 540.0 * (y - cy) / span);

        let mut svg = String::from(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 600 600\" width=\"600\" height=\"600\">\n",
        );
        let mut line = |pts: &[(f64, f64)], stroke: &str, extra: &str| {
            let coords: Vec<String> = pts
                .iter()
                .map(|&p| {
                    let (x, y) = map(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let _ = writeln!(
                svg,
                "<polyline fill=\"none\" stroke=\"{stroke}\" stroke-width=\"0.6\"{extra} points=\"{}\"/>",
                coords.join(" ")
            );
        };
        for i in 0..=self.grid {
            let row: Vec<_> = (i..=self.grid).map(|j| self.at(i, j)).collect();
            line(&row, "#9aa", "");
            let col: Vec<_> = (0..=i).map(|r| self.at(r, i)).collect();
            line(&col, "#9aa", "");
        }
        for (_, pts) in &self.boundary {
            let pts: Vec<_> = pts.iter().map(|s| s.psi).collect();
            line(&pts, "#000", "");
        }
        let lam: Vec<_> = self.lambda_line.iter().map(|&(_, a, b)| (a, b)).collect();
        line(&lam, "#c00", " stroke-dasharray=\"4 3\"");
        if let Some((tx, ty)) = self.target {
            let d = 0.02 * span;
            line(&[(tx - d, ty - d), (tx + d, ty + d)], "#c00", "");
            line(&[(tx - d, ty + d), (tx + d, ty - d)], "#c00", "");
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn in_triangle(p: (f64, f64), t: &[(f64, f64); 3]) -> bool {
    let cross = |a: (f64, f64), b: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
    let d = [cross(t[0], t[1]), cross(t[1], t[2]), cross(t[2], t[0])];
    let neg = d.iter().any(|&v| v < 0.0);
    let pos = d.iter().any(|&v| v > 0.0);
    !(neg && pos)
}
