//! SVG artifacts: cluster-colored drawings, score-series line charts, and
//! per-layout bar charts.
//!
//! Everything here is a pure function from inputs to an SVG 1.1 document;
//! coordinates are written with fixed precision, so the same inputs always
//! produce byte-identical output.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::experiments::{LayoutMeans, StepMeans};
use crate::graph::{ClusterLabeling, Graph};
use crate::layouts::Layout;
use crate::scalar::Scalar;

/// Categorical base palette: 36 visually distinct fills (several standard
/// qualitative palettes concatenated). Cluster ids beyond the list reuse it
/// with shifted lightness, so even very many clusters stay tellable apart.
pub const DEFAULT_PALETTE: [&str; 36] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf", "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
    "#f7b6d2", "#dbdb8d", "#9edae5", "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173",
    "#5254a3", "#8ca252", "#bd9e39", "#ad494a", "#a55194", "#6b6ecf", "#b5cf6b", "#e7ba52",
    "#d6616b", "#ce6dbd", "#9c9ede", "#cedb9c",
];

/// Line/bar colors for the five metrics, in canonical metric order.
const METRIC_COLORS: [&str; 5] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];

/// Visual parameters shared by all renderers.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    /// Canvas width in pixels.
    pub width: f64,
    /// Canvas height in pixels.
    pub height: f64,
    /// Blank border inside the canvas.
    pub margin: f64,
    /// Vertex radius in drawings.
    pub node_radius: f64,
    /// Edge stroke opacity in drawings.
    pub edge_opacity: f64,
    /// Cluster fill colors (`#rrggbb`), cycled with lightness shifts when
    /// there are more clusters than entries.
    pub palette: Vec<String>,
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 600.0,
            margin: 40.0,
            node_radius: 4.0,
            edge_opacity: 0.35,
            palette: DEFAULT_PALETTE.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl RenderStyle {
    /// Check the style for values the renderers cannot work with.
    pub fn validate(&self) -> Result<()> {
        if !self.node_radius.is_finite() || self.node_radius <= 0.0 {
            return Err(Error::invalid("node_radius", "must be positive and finite"));
        }
        if self.palette.is_empty() {
            return Err(Error::invalid("palette", "needs at least one color"));
        }
        for color in &self.palette {
            if parse_hex_color(color).is_none() {
                return Err(Error::invalid(
                    "palette",
                    format!("{color:?} is not a #rrggbb color"),
                ));
            }
        }
        if !(self.edge_opacity >= 0.0 && self.edge_opacity <= 1.0) {
            return Err(Error::invalid("edge_opacity", "must be within [0, 1]"));
        }
        for (name, value) in [("width", self.width), ("height", self.height)] {
            if !(value.is_finite() && value > 2.0 * self.margin + 20.0) {
                return Err(Error::invalid(
                    name,
                    format!("{value} leaves no room inside the margins"),
                ));
            }
        }
        Ok(())
    }
}

fn parse_hex_color(s: &str) -> Option<[u8; 3]> {
    let hex = s.strip_prefix('#')?;
    if hex.len() != 6 {
        return None;
    }
    let mut rgb = [0u8; 3];
    for (i, slot) in rgb.iter_mut().enumerate() {
        *slot = u8::from_str_radix(&hex[2 * i..2 * i + 2], 16).ok()?;
    }
    Some(rgb)
}

/// Fill color for a cluster id. The palette cycles; every pass beyond the
/// first shifts lightness (toward white, then black, then further) so
/// repeats stay distinguishable.
pub fn cluster_color(palette: &[String], id: usize) -> String {
    let base = &palette[id % palette.len()];
    let cycle = id / palette.len();
    if cycle == 0 {
        return base.clone();
    }
    let [r, g, b] = parse_hex_color(base).unwrap_or([128, 128, 128]);
    // Odd cycles mix toward white, even toward black, more strongly each
    // time around.
    let strength = 1.0 - 0.6f64.powi(cycle.div_ceil(2) as i32);
    let target = if cycle % 2 == 1 { 255.0 } else { 0.0 };
    let mix = |channel: u8| -> u8 {
        (channel as f64 + (target - channel as f64) * strength).round() as u8
    };
    format!("#{:02x}{:02x}{:02x}", mix(r), mix(g), mix(b))
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn svg_open(buf: &mut String, style: &RenderStyle) {
    let _ = writeln!(buf, r##"<?xml version="1.0" encoding="UTF-8"?>"##);
    let _ = writeln!(
        buf,
        r##"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"##,
        w = style.width,
        h = style.height,
    );
    let _ = writeln!(buf, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
}

/// Render a drawing: one line per edge underneath one circle per vertex,
/// vertices filled by cluster, coordinates mapped onto the canvas with the
/// aspect ratio preserved.
pub fn render_drawing<F: Scalar>(
    g: &Graph,
    layout: &Layout<F>,
    labeling: &ClusterLabeling,
    style: &RenderStyle,
) -> Result<String> {
    style.validate()?;
    if layout.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            context: "rendering layout vs graph",
            left: layout.len(),
            right: g.vertex_count(),
        });
    }
    if labeling.len() != g.vertex_count() {
        return Err(Error::SizeMismatch {
            context: "rendering labeling vs graph",
            left: labeling.len(),
            right: g.vertex_count(),
        });
    }

    // Affine map from layout coordinates to canvas pixels: uniform scale
    // (aspect preserved), centered, y flipped to put larger y higher up.
    let origin = crate::layouts::Point::new(F::zero(), F::zero());
    let (min, max) = layout.bounding_box().unwrap_or((origin, origin));
    let (bw, bh) = (
        (max.x - min.x).to_f64().unwrap_or(0.0),
        (max.y - min.y).to_f64().unwrap_or(0.0),
    );
    let avail_w = style.width - 2.0 * style.margin;
    let avail_h = style.height - 2.0 * style.margin;
    let mut scale = f64::INFINITY;
    if bw > 0.0 {
        scale = scale.min(avail_w / bw);
    }
    if bh > 0.0 {
        scale = scale.min(avail_h / bh);
    }
    if !scale.is_finite() {
        scale = 1.0;
    }
    let x0 = style.margin + (avail_w - bw * scale) / 2.0;
    let y0 = style.margin + (avail_h - bh * scale) / 2.0;
    let place = |p: &crate::layouts::Point<F>| -> (f64, f64) {
        let px = x0 + (p.x - min.x).to_f64().unwrap_or(0.0) * scale;
        let py = style.height - (y0 + (p.y - min.y).to_f64().unwrap_or(0.0) * scale);
        (px, py)
    };

    let mut buf = String::new();
    svg_open(&mut buf, style);
    let _ = writeln!(
        buf,
        r##"<g stroke="#555555" stroke-width="1" stroke-opacity="{}">"##,
        style.edge_opacity
    );
    for &(u, v) in g.edges() {
        let (x1, y1) = place(&layout.positions()[u as usize]);
        let (x2, y2) = place(&layout.positions()[v as usize]);
        let _ = writeln!(
            buf,
            r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"##
        );
    }
    let _ = writeln!(buf, "</g>");
    let _ = writeln!(buf, "<g>");
    for (v, p) in layout.positions().iter().enumerate() {
        let (cx, cy) = place(p);
        let fill = cluster_color(&style.palette, labeling.label_of(v));
        let _ = writeln!(
            buf,
            r##"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r}" fill="{fill}"/>"##,
            r = style.node_radius
        );
    }
    let _ = writeln!(buf, "</g>");
    buf.push_str("</svg>\n");
    Ok(buf)
}

/// Pixel frame of a chart's plot area, with the fixed score scale [0, 1].
struct ChartFrame {
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl ChartFrame {
    fn new(style: &RenderStyle) -> Self {
        Self {
            left: style.margin + 36.0,
            right: style.width - style.margin,
            top: style.margin,
            bottom: style.height - style.margin - 22.0,
        }
    }

    fn y(&self, score: f64) -> f64 {
        self.bottom - score.clamp(0.0, 1.0) * (self.bottom - self.top)
    }

    fn draw_axes(&self, buf: &mut String) {
        let _ = writeln!(
            buf,
            r##"<g stroke="#cccccc" stroke-width="1" font-family="sans-serif" font-size="11" fill="#333333">"##
        );
        for i in 0..=4 {
            let score = i as f64 / 4.0;
            let y = self.y(score);
            let _ = writeln!(
                buf,
                r##"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}"/>"##,
                self.left, self.right
            );
            let _ = writeln!(
                buf,
                r##"<text x="{:.3}" y="{:.3}" text-anchor="end" stroke="none">{score}</text>"##,
                self.left - 6.0,
                y + 4.0
            );
        }
        let _ = writeln!(buf, "</g>");
        let _ = writeln!(
            buf,
            r##"<line x1="{l:.3}" y1="{t:.3}" x2="{l:.3}" y2="{b:.3}" stroke="#333333" stroke-width="1"/>"##,
            l = self.left,
            t = self.top,
            b = self.bottom
        );
        let _ = writeln!(
            buf,
            r##"<line x1="{l:.3}" y1="{b:.3}" x2="{r:.3}" y2="{b:.3}" stroke="#333333" stroke-width="1"/>"##,
            l = self.left,
            r = self.right,
            b = self.bottom
        );
    }

    fn draw_legend(&self, buf: &mut String, labels: [&str; 5]) {
        let x = self.right - 70.0;
        let _ = writeln!(
            buf,
            r##"<g font-family="sans-serif" font-size="11" fill="#333333">"##
        );
        for (i, (label, color)) in labels.iter().zip(METRIC_COLORS).enumerate() {
            let y = self.top + 8.0 + i as f64 * 15.0;
            let _ = writeln!(
                buf,
                r##"<rect x="{x:.3}" y="{:.3}" width="10" height="10" fill="{color}"/>"##,
                y - 8.0
            );
            let _ = writeln!(buf, r##"<text x="{:.3}" y="{y:.3}">{label}</text>"##, x + 14.0);
        }
        let _ = writeln!(buf, "</g>");
    }

    /// Downward triangle where a score fell below the chart's floor (the
    /// adjusted Rand index can go negative; the axis stays at [0, 1]).
    fn clamp_marker(&self, buf: &mut String, x: f64, color: &str) {
        let y = self.bottom;
        let _ = writeln!(
            buf,
            r##"<polygon class="clamp-marker" points="{:.3},{y:.3} {:.3},{y:.3} {x:.3},{:.3}" fill="{color}"/>"##,
            x - 4.0,
            x + 4.0,
            y + 6.0
        );
    }
}

fn metric_labels() -> [&'static str; 5] {
    ["cq_ari", "cq_ami", "cq_fmi", "cq_hom", "cq_cmp"]
}

/// Render per-step score means as a line chart: x = deformation step,
/// y = score on the fixed [0, 1] scale, one line per metric. Scores below 0
/// are drawn at 0 with a marker.
pub fn render_series_chart<F: Scalar>(steps: &[StepMeans<F>], style: &RenderStyle) -> Result<String> {
    style.validate()?;
    if steps.is_empty() {
        return Err(Error::TooFew {
            context: "series chart",
            minimum: 1,
            unit: "steps",
            actual: 0,
        });
    }

    let frame = ChartFrame::new(style);
    let lo = steps.iter().map(|s| s.step).min().unwrap_or(0) as f64;
    let hi = steps.iter().map(|s| s.step).max().unwrap_or(0) as f64;
    let x = |step: usize| -> f64 {
        if hi > lo {
            frame.left + (step as f64 - lo) / (hi - lo) * (frame.right - frame.left)
        } else {
            (frame.left + frame.right) / 2.0
        }
    };

    let mut buf = String::new();
    svg_open(&mut buf, style);
    frame.draw_axes(&mut buf);

    // x tick labels; thin out when there are many steps.
    let every = (steps.len() / 12).max(1);
    let _ = writeln!(
        buf,
        r##"<g font-family="sans-serif" font-size="11" fill="#333333" text-anchor="middle">"##
    );
    for s in steps.iter().step_by(every) {
        let _ = writeln!(
            buf,
            r##"<text x="{:.3}" y="{:.3}">{}</text>"##,
            x(s.step),
            frame.bottom + 16.0,
            s.step
        );
    }
    let _ = writeln!(
        buf,
        r##"<text x="{:.3}" y="{:.3}">step</text>"##,
        (frame.left + frame.right) / 2.0,
        style.height - 6.0
    );
    let _ = writeln!(buf, "</g>");

    for (m, color) in METRIC_COLORS.iter().enumerate() {
        let mut points = String::new();
        let mut clamped: Vec<f64> = Vec::new();
        for s in steps {
            let value = s.means.metric_values()[m].1.to_f64().unwrap_or(f64::NAN);
            let px = x(s.step);
            let _ = write!(points, "{px:.3},{:.3} ", frame.y(value));
            if value < 0.0 {
                clamped.push(px);
            }
        }
        let _ = writeln!(
            buf,
            r##"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"##,
            points.trim_end()
        );
        for px in clamped {
            frame.clamp_marker(&mut buf, px, color);
        }
    }

    frame.draw_legend(&mut buf, metric_labels());
    buf.push_str("</svg>\n");
    Ok(buf)
}

/// Render per-layout score means as a grouped bar chart: one group per
/// layout, one bar per metric, y on the fixed [0, 1] scale. Negative means
/// appear as a marker at 0; layouts without any score get an annotation
/// instead of bars.
pub fn render_comparison_chart<F: Scalar>(
    means: &[LayoutMeans<F>],
    style: &RenderStyle,
) -> Result<String> {
    style.validate()?;
    if means.is_empty() {
        return Err(Error::TooFew {
            context: "comparison chart",
            minimum: 1,
            unit: "layouts",
            actual: 0,
        });
    }

    let frame = ChartFrame::new(style);
    let group_w = (frame.right - frame.left) / means.len() as f64;
    let bar_w = group_w * 0.8 / 5.0;

    let mut buf = String::new();
    svg_open(&mut buf, style);
    frame.draw_axes(&mut buf);

    let _ = writeln!(
        buf,
        r##"<g font-family="sans-serif" font-size="11" fill="#333333" text-anchor="middle">"##
    );
    for (i, layout) in means.iter().enumerate() {
        let center = frame.left + (i as f64 + 0.5) * group_w;
        let _ = writeln!(
            buf,
            r##"<text x="{center:.3}" y="{:.3}">{}</text>"##,
            frame.bottom + 16.0,
            xml_escape(&layout.layout)
        );
    }
    let _ = writeln!(buf, "</g>");

    for (i, layout) in means.iter().enumerate() {
        let group_left = frame.left + i as f64 * group_w + group_w * 0.1;
        match &layout.means {
            Some(scores) => {
                for (m, color) in METRIC_COLORS.iter().enumerate() {
                    let value = scores.metric_values()[m].1.to_f64().unwrap_or(f64::NAN);
                    let bx = group_left + m as f64 * bar_w;
                    let top = frame.y(value.max(0.0));
                    let height = frame.bottom - top;
                    let _ = writeln!(
                        buf,
                        r##"<rect x="{bx:.3}" y="{top:.3}" width="{bar_w:.3}" height="{height:.3}" fill="{color}"/>"##
                    );
                    if value < 0.0 {
                        frame.clamp_marker(&mut buf, bx + bar_w / 2.0, color);
                    }
                }
            }
            None => {
                let center = frame.left + (i as f64 + 0.5) * group_w;
                let _ = writeln!(
                    buf,
                    r##"<text x="{center:.3}" y="{:.3}" font-family="sans-serif" font-size="11" fill="#888888" text-anchor="middle">no scores</text>"##,
                    frame.y(0.5)
                );
            }
        }
    }

    frame.draw_legend(&mut buf, metric_labels());
    buf.push_str("</svg>\n");
    Ok(buf)
}

/// Canonical artifact file name: `<dataset>_<layout>[_step<t>].svg`, with
/// anything outside `[A-Za-z0-9._-]` replaced so the name is safe on any
/// filesystem.
pub fn artifact_file_name(dataset: &str, layout: &str, step: Option<usize>) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                    c
                } else {
                    '-'
                }
            })
            .collect()
    };
    match step {
        Some(t) => format!("{}_{}_step{t}.svg", clean(dataset), clean(layout)),
        None => format!("{}_{}.svg", clean(dataset), clean(layout)),
    }
}
