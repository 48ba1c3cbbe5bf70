//! Minimal hand-rolled SVG line plots for sweep tables: one series per n,
//! a chosen column against density, with optional threshold verticals.

use crate::error::{Error, Result};
use crate::harness::SweepPoint;

#[derive(Debug, Clone)]
pub struct PlotSpec {
    /// Column to plot: one of p_sat, f_S_mean, f_B_mean, f_SC_mean,
    /// f_BC_mean, dpll_nodes_median, width_median, mus_varfrac_mean.
    pub column: String,
    pub title: String,
    /// Densities to mark with dashed verticals.
    pub thresholds: Vec<f64>,
}

fn column_value(p: &SweepPoint, column: &str) -> Option<f64> {
    match column {
        "p_sat" => Some(p.p_sat),
        "f_S_mean" => p.f_s_mean,
        "f_B_mean" => p.f_b_mean,
        "f_SC_mean" => p.f_sc_mean,
        "f_BC_mean" => p.f_bc_mean,
        "dpll_nodes_median" => p.dpll_nodes_median,
        "width_median" => p.width_median,
        "mus_varfrac_mean" => p.mus_varfrac_mean,
        _ => None,
    }
}

const PALETTE: &[&str] = &["#1b6ca8", "#c23b22", "#2e8540", "#7d3c98", "#b7950b", "#117a65"];

/// Renders the plot as an SVG document string.
pub fn emit_svg(points: &[SweepPoint], spec: &PlotSpec) -> Result<String> {
    if points.is_empty() {
        return Err(Error::DomainError("empty sweep table".into()));
    }
    let known = [
        "p_sat",
        "f_S_mean",
        "f_B_mean",
        "f_SC_mean",
        "f_BC_mean",
        "dpll_nodes_median",
        "width_median",
        "mus_varfrac_mean",
    ];
    if !known.contains(&spec.column.as_str()) {
        return Err(Error::DomainError(format!("unknown plot column `{}`", spec.column)));
    }
    let (w, h) = (640.0, 420.0);
    let (ml, mr, mt, mb) = (60.0, 20.0, 40.0, 50.0);

    let mut series_keys: Vec<(String, usize)> = points
        .iter()
        .map(|p| (p.problem.clone(), p.n))
        .collect();
    series_keys.sort();
    series_keys.dedup();

    let xs: Vec<f64> = points.iter().map(|p| p.c).collect();
    let mut ys: Vec<f64> = points
        .iter()
        .filter_map(|p| column_value(p, &spec.column))
        .collect();
    if ys.is_empty() {
        return Err(Error::DomainError(format!(
            "column `{}` has no values in this table",
            spec.column
        )));
    }
    let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min).min(
        spec.thresholds.iter().cloned().fold(f64::INFINITY, f64::min),
    );
    let xmax = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(
        spec.thresholds.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    );
    ys.push(0.0);
    let ymin = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let ymax = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let yspan = if (ymax - ymin).abs() < f64::EPSILON { 1.0 } else { ymax - ymin };
    let xspan = if (xmax - xmin).abs() < f64::EPSILON { 1.0 } else { xmax - xmin };

    let px = |x: f64| ml + (x - xmin) / xspan * (w - ml - mr);
    let py = |y: f64| h - mb - (y - ymin) / yspan * (h - mt - mb);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    out.push_str(&format!(
        "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        w / 2.0,
        xml_escape(&spec.title)
    ));
    // axes
    out.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb,
        w - mr,
        h - mb
    ));
    out.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{mt}\" x2=\"{ml}\" y2=\"{}\" stroke=\"black\"/>\n",
        h - mb
    ));
    // axis labels and a few ticks
    for i in 0..=4 {
        let x = xmin + xspan * i as f64 / 4.0;
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{:.2}</text>\n",
            px(x),
            h - mb + 16.0,
            x
        ));
        let y = ymin + yspan * i as f64 / 4.0;
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{:.2}</text>\n",
            ml - 6.0,
            py(y) + 4.0,
            y
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">c</text>\n",
        (ml + w - mr) / 2.0,
        h - 12.0
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (mt + h - mb) / 2.0,
        (mt + h - mb) / 2.0,
        xml_escape(&spec.column)
    ));
    // threshold verticals
    for &t in &spec.thresholds {
        out.push_str(&format!(
            "<line x1=\"{:.1}\" y1=\"{mt}\" x2=\"{:.1}\" y2=\"{}\" stroke=\"#888\" stroke-dasharray=\"5,4\"/>\n",
            px(t),
            px(t),
            h - mb
        ));
    }
    // series
    for (si, (problem, n)) in series_keys.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|p| &p.problem == problem && p.n == *n)
            .filter_map(|p| column_value(p, &spec.column).map(|y| (p.c, y)))
            .collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        if pts.is_empty() {
            continue;
        }
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &pts {
            out.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"2.5\" fill=\"{color}\"/>\n",
                px(x),
                py(y)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"{color}\">{} n={}</text>\n",
            w - mr - 120.0,
            mt + 14.0 * si as f64 + 4.0,
            xml_escape(problem),
            n
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_rejected() {
        let spec = PlotSpec {
            column: "p_sat".into(),
            title: "t".into(),
            thresholds: vec![],
        };
        assert!(emit_svg(&[], &spec).is_err());
    }
}
