//! Minimal SVG box plots over sweep rows, as a convenience layer on top of
//! the CSV tables.

use crate::harness::monte_carlo::SweepRow;
use crate::replan::StrategyKind;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_BOTTOM: f64 = 50.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_RIGHT: f64 = 20.0;

/// Five-number summary of a sample.
#[derive(Debug, Clone, Copy)]
struct Summary {
    min: f64,
    q1: f64,
    median: f64,
    q3: f64,
    max: f64,
}

fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantile = |q: f64| -> f64 {
        let pos = q * (sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let w = pos - lo as f64;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    };
    Some(Summary {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: *sorted.last().unwrap(),
    })
}

/// Renders one box per labeled sample group.
pub fn boxplot_svg(title: &str, y_label: &str, groups: &[(String, Vec<f64>)]) -> String {
    let summaries: Vec<(String, Summary)> = groups
        .iter()
        .filter_map(|(label, values)| summarize(values).map(|s| (label.clone(), s)))
        .collect();

    let (lo, hi) = summaries.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY),
        |(lo, hi), (_, s)| (lo.min(s.min), hi.max(s.max)),
    );
    let (lo, hi) = if summaries.is_empty() {
        (0.0, 1.0)
    } else if (hi - lo).abs() < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = (hi - lo) * 0.08;
        (lo - pad, hi + pad)
    };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let y = |value: f64| MARGIN_TOP + plot_h * (1.0 - (value - lo) / (hi - lo));

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n",
        WIDTH / 2.0
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {})\">{y_label}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{}\" \
         stroke=\"black\"/>\n",
        MARGIN_TOP + plot_h
    ));
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        MARGIN_TOP + plot_h,
        MARGIN_LEFT + plot_w,
        MARGIN_TOP + plot_h
    ));
    // Y ticks.
    for i in 0..=4 {
        let value = lo + (hi - lo) * i as f64 / 4.0;
        let ty = y(value);
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{ty}\" x2=\"{MARGIN_LEFT}\" y2=\"{ty}\" stroke=\"black\"/>\n",
            MARGIN_LEFT - 4.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"end\">{value:.2}</text>\n",
            MARGIN_LEFT - 8.0,
            ty + 4.0
        ));
    }

    let n = summaries.len().max(1) as f64;
    let slot = plot_w / n;
    let box_w = (slot * 0.5).min(80.0);
    for (i, (label, s)) in summaries.iter().enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let half = box_w / 2.0;
        // Whiskers.
        svg.push_str(&format!(
            "  <line x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"black\"/>\n",
            y(s.min),
            y(s.q1)
        ));
        svg.push_str(&format!(
            "  <line x1=\"{cx}\" y1=\"{}\" x2=\"{cx}\" y2=\"{}\" stroke=\"black\"/>\n",
            y(s.q3),
            y(s.max)
        ));
        for value in [s.min, s.max] {
            svg.push_str(&format!(
                "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
                cx - half / 2.0,
                y(value),
                cx + half / 2.0,
                y(value)
            ));
        }
        // Box and median.
        svg.push_str(&format!(
            "  <rect x=\"{}\" y=\"{}\" width=\"{box_w}\" height=\"{}\" fill=\"#9ecae1\" \
             stroke=\"black\"/>\n",
            cx - half,
            y(s.q3),
            (y(s.q1) - y(s.q3)).max(0.5)
        ));
        svg.push_str(&format!(
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" \
             stroke-width=\"2\"/>\n",
            cx - half,
            y(s.median),
            cx + half,
            y(s.median)
        ));
        svg.push_str(&format!(
            "  <text x=\"{cx}\" y=\"{}\" text-anchor=\"middle\">{label}</text>\n",
            MARGIN_TOP + plot_h + 18.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Box plot of reconvergence rounds per strategy, built from sweep rows.
pub fn reconvergence_boxplot(rows: &[SweepRow], strategies: &[StrategyKind]) -> String {
    let groups: Vec<(String, Vec<f64>)> = strategies
        .iter()
        .map(|&strategy| {
            let samples = rows
                .iter()
                .filter(|r| r.strategy == strategy && r.arrival_index > 0)
                .map(|r| r.rounds as f64)
                .collect();
            (strategy.to_string(), samples)
        })
        .collect();
    boxplot_svg(
        "Reconvergence rounds per arrival",
        "rounds",
        &groups,
    )
}
