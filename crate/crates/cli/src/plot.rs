use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use coneretract::cones::intersect_with_plane;
use coneretract::geometry::plane_through;
use coneretract::retractions::{build_2d, RetractionPair2D};
use coneretract::{
    build_transversal, is_transversal, Error, Plane2D, ToleranceConfig, TransversalSearch, Vector,
};

use crate::commands::{load, CliError, CliResult};

const SIZE: f64 = 480.0;
const SCALE: f64 = 150.0;
const SECTOR_RADIUS: f64 = 1.4;

fn screen(p: [f64; 2]) -> (f64, f64) {
    (SIZE / 2.0 + SCALE * p[0], SIZE / 2.0 - SCALE * p[1])
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn coords(p: [f64; 2]) -> String {
    format!("{:.6},{:.6}", p[0], p[1])
}

/// Planar pair for `M`, `N` on the plane to draw.
fn planar(
    spec: &Path,
    m: &str,
    n: &str,
    point: Option<&[f64]>,
    tol: &ToleranceConfig,
) -> Result<RetractionPair2D, CliError> {
    let spec = load(spec)?;
    let poly = |name: &str| {
        spec.build(name, tol)?
            .polyhedral()
            .cloned()
            .ok_or_else(|| CliError::usage(format!("{name}: a polyhedral cone is needed here")))
    };
    let (mc, nc) = (poly(m)?, poly(n)?);
    match mc.dim() {
        2 => {
            let plane = Plane2D::coordinate(2, 0, 1);
            let slice = |k| -> Result<_, CliError> {
                intersect_with_plane(k, &plane)?
                    .into_sector()
                    .ok_or_else(|| Error::SliceDegenerate("zero slice".into()).into())
            };
            Ok(build_2d(&slice(&mc)?, &slice(&nc)?)?)
        }
        3 => {
            let Some(x) = point else {
                return Err(CliError::usage(
                    "plotting in R^3 needs --x to fix the slice plane",
                ));
            };
            if x.len() != 3 {
                return Err(CliError::usage("--x must have 3 coordinates"));
            }
            let cert = match is_transversal(&mc, &nc)? {
                TransversalSearch::Found(c) => c,
                TransversalSearch::NotFound => return Err(Error::TransversalNotFound.into()),
            };
            let pair = build_transversal(&mc, &nc, &cert)?;
            let x = Vector::new(x.to_vec())?;
            let plane = plane_through(&x, pair.delta_dir(), tol).map_err(|_| {
                CliError::usage("--x lies on the transversal line; pick another point")
            })?;
            Ok(pair.planar_pair(&plane)?)
        }
        d => Err(CliError::usage(format!(
            "plot supports R^2 and R^3, not R^{d}"
        ))),
    }
}

fn grid_points(grid: usize) -> Vec<[f64; 2]> {
    let axis: Vec<f64> = match grid {
        0 => vec![],
        1 => vec![0.0],
        g => (0..g)
            .map(|i| -1.0 + 2.0 * i as f64 / (g - 1) as f64)
            .collect(),
    };
    axis.iter()
        .flat_map(|&s| axis.iter().map(move |&t| [s, t]))
        .collect()
}

pub fn render_svg(pair: &RetractionPair2D, grid: usize) -> String {
    let mut svg = String::new();
    let a = pair.plane.basis_a().as_slice();
    let b = pair.plane.basis_b().as_slice();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" data-plane-a="{}" data-plane-b="{}">"#,
        join(a),
        join(b)
    );
    if grid == 0 {
        svg.push_str("</svg>\n");
        return svg;
    }
    svg.push_str(concat!(
        "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"5\" markerHeight=\"5\" orient=\"auto\">",
        "<path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n",
    ));
    let fills = ["#cfe3f7", "#f2f2f2", "#f7d9cf", "#f2f2f2"];
    let bounds = [
        (pair.e1, pair.e2),
        (pair.e2, pair.u1),
        (pair.u1, pair.u2),
        (pair.u2, pair.e1),
    ];
    for (i, (angle, (from, to))) in pair.sector_angles().iter().zip(bounds).enumerate() {
        if *angle <= 0.0 {
            continue;
        }
        let (x0, y0) = screen([0.0, 0.0]);
        let f = unit(from);
        let t = unit(to);
        let (x1, y1) = screen([SECTOR_RADIUS * f[0], SECTOR_RADIUS * f[1]]);
        let (x2, y2) = screen([SECTOR_RADIUS * t[0], SECTOR_RADIUS * t[1]]);
        let large = u8::from(*angle > std::f64::consts::PI);
        let r = SECTOR_RADIUS * SCALE;
        let _ = writeln!(
            svg,
            r#"<path class="sector" data-sector="K{}" d="M{x0:.2},{y0:.2} L{x1:.2},{y1:.2} A{r:.2},{r:.2} 0 {large} 0 {x2:.2},{y2:.2} Z" fill="{}"/>"#,
            i + 1,
            fills[i]
        );
    }
    for (name, v) in [
        ("e1", pair.e1),
        ("e2", pair.e2),
        ("u1", pair.u1),
        ("u2", pair.u2),
    ] {
        let u = unit(v);
        let (x0, y0) = screen([0.0, 0.0]);
        let (x1, y1) = screen([1.45 * u[0], 1.45 * u[1]]);
        let (lx, ly) = screen([1.47 * u[0], 1.47 * u[1]]);
        let _ = writeln!(
            svg,
            r#"<line class="ray" data-ray="{name}" x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y1:.2}" stroke="black"/><text x="{lx:.2}" y="{ly:.2}" font-size="12">{name}</text>"#
        );
    }
    for x in grid_points(grid) {
        let (q, r) = pair.eval_2d(x);
        let (x1, y1) = screen(x);
        let (x2, y2) = screen(q);
        let _ = writeln!(
            svg,
            r##"<line class="arrow" data-x="{}" data-qx="{}" data-rx="{}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#1f4e9c" marker-end="url(#head)"/>"##,
            coords(x),
            coords(q),
            coords(r)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(|c| format!("{c:.6}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn write_csv(pair: &RetractionPair2D, grid: usize, path: &Path) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::usage(e.to_string());
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record([
        "x_s",
        "x_t",
        "qx_s",
        "qx_t",
        "rx_s",
        "rx_t",
        "sum_residual",
        "polarity_residual",
    ])
    .map_err(io)?;
    for x in grid_points(grid) {
        let (q, r) = pair.eval_2d(x);
        let sum = (q[0] + r[0] - x[0]).hypot(q[1] + r[1] - x[1]);
        let (qr, _) = pair.eval_2d(r);
        let (_, rq) = pair.eval_2d(q);
        let polarity = qr[0].hypot(qr[1]) + rq[0].hypot(rq[1]);
        let row = [x[0], x[1], q[0], q[1], r[0], r[1], sum, polarity].map(|v| format!("{v:.12e}"));
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn plot(
    spec: &Path,
    m: &str,
    n: &str,
    out: &Path,
    grid: usize,
    point: Option<&[f64]>,
    csv_path: Option<&Path>,
    tol: &ToleranceConfig,
) -> CliResult {
    let pair = planar(spec, m, n, point, tol)?;
    std::fs::write(out, render_svg(&pair, grid))?;
    if let Some(path) = csv_path {
        write_csv(&pair, grid, path)?;
    }
    let drawn = pair.sector_angles().iter().filter(|a| **a > 0.0).count();
    let _ = writeln!(
        std::io::stdout(),
        "wrote {} ({drawn} sectors, {} arrows)",
        out.display(),
        grid * grid
    );
    Ok(0)
}
