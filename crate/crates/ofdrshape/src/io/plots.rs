//! Deterministic SVG plots: strain profiles per frame and reconstructed
//! shapes overlaid on the planned path with tube walls.
//!
//! Everything is emitted by hand with fixed precision so the same inputs
//! always produce byte-identical files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::reconstruction::PlanarShape;
use crate::simulator::FrameSeries;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 48.0;

/// Line colors cycled across frames or trials.
const PALETTE: [&str; 7] = [
    "#1b6ca8", "#c0392b", "#1e8449", "#8e44ad", "#d68910", "#148f9f", "#5d6d7e",
];

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn esc(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Tick positions on a 1-2-5 ladder covering `[min, max]`.
fn ticks(min: f64, max: f64, target: usize) -> Vec<f64> {
    let range = max - min;
    if !(range.is_finite()) || range <= 0.0 || target < 2 {
        return vec![min];
    }
    let raw = range / (target - 1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let step = mag
        * if norm <= 1.0 {
            1.0
        } else if norm <= 2.0 {
            2.0
        } else if norm <= 5.0 {
            5.0
        } else {
            10.0
        };
    let mut out = Vec::new();
    let mut t = (min / step).ceil() * step;
    while t <= max + 1e-9 * step {
        // Snap values that are zero up to rounding so labels read "0".
        out.push(if t.abs() < 1e-9 * step { 0.0 } else { t });
        t += step;
    }
    out
}

struct Frame2D {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame2D {
    fn padded(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Self {
        let pad = |lo: f64, hi: f64| {
            let span = (hi - lo).abs();
            let pad = if span > 0.0 { 0.05 * span } else { 1.0 };
            (lo - pad, hi + pad)
        };
        let (x_min, x_max) = pad(x_min, x_max);
        let (y_min, y_max) = pad(y_min, y_max);
        Frame2D {
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    /// Expand the shorter axis so one data unit maps to the same number of
    /// pixels in x and y.
    fn equalize_aspect(&mut self) {
        let px_per_x = (WIDTH - MARGIN_L - MARGIN_R) / (self.x_max - self.x_min);
        let px_per_y = (HEIGHT - MARGIN_T - MARGIN_B) / (self.y_max - self.y_min);
        if px_per_x > px_per_y {
            let need = (WIDTH - MARGIN_L - MARGIN_R) / px_per_y;
            let extra = (need - (self.x_max - self.x_min)) / 2.0;
            self.x_min -= extra;
            self.x_max += extra;
        } else {
            let need = (HEIGHT - MARGIN_T - MARGIN_B) / px_per_x;
            let extra = (need - (self.y_max - self.y_min)) / 2.0;
            self.y_min -= extra;
            self.y_max += extra;
        }
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn sy(&self, y: f64) -> f64 {
        HEIGHT
            - MARGIN_B
            - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

struct Svg {
    body: String,
}

impl Svg {
    fn new(title: &str) -> Svg {
        let mut body = String::new();
        body.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        body.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
        ));
        body.push_str(&format!(
            "<text x=\"{}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(WIDTH / 2.0),
            esc(title)
        ));
        Svg { body }
    }

    fn axes(&mut self, frame: &Frame2D, x_label: &str, y_label: &str) {
        let x0 = MARGIN_L;
        let x1 = WIDTH - MARGIN_R;
        let y0 = HEIGHT - MARGIN_B;
        let y1 = MARGIN_T;
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            fmt(x0), fmt(y0), fmt(x1), fmt(y0)
        ));
        self.body.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
            fmt(x0), fmt(y0), fmt(x0), fmt(y1)
        ));
        for t in ticks(frame.x_min, frame.x_max, 7) {
            let sx = frame.sx(t);
            if sx < x0 - 1e-6 || sx > x1 + 1e-6 {
                continue;
            }
            self.body.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
                fmt(sx), fmt(y0), fmt(y0 + 5.0)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"middle\">{}</text>\n",
                fmt(sx),
                fmt(y0 + 18.0),
                fmt_tick(t)
            ));
        }
        for t in ticks(frame.y_min, frame.y_max, 6) {
            let sy = frame.sy(t);
            if sy > y0 + 1e-6 || sy < y1 - 1e-6 {
                continue;
            }
            self.body.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
                fmt(x0 - 5.0), fmt(x0), fmt(sy)
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" \
                 text-anchor=\"end\">{}</text>\n",
                fmt(x0 - 8.0),
                fmt(sy + 4.0),
                fmt_tick(t)
            ));
        }
        self.body.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt((x0 + x1) / 2.0),
            fmt(HEIGHT - 10.0),
            esc(x_label)
        ));
        self.body.push_str(&format!(
            "<text x=\"16\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
            fmt((y0 + y1) / 2.0),
            fmt((y0 + y1) / 2.0),
            esc(y_label)
        ));
    }

    fn polyline(
        &mut self,
        frame: &Frame2D,
        pts: &[(f64, f64)],
        color: &str,
        width: f64,
        dash: Option<&str>,
    ) {
        if pts.is_empty() {
            return;
        }
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{},{}", fmt(frame.sx(x)), fmt(frame.sy(y))))
            .collect();
        let dash = dash.map_or(String::new(), |d| format!(" stroke-dasharray=\"{d}\""));
        self.body.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"{}\"{}/>\n",
            coords.join(" "),
            color,
            fmt(width),
            dash
        ));
    }

    fn legend(&mut self, entries: &[(String, &str, Option<&str>)]) {
        let mut y = MARGIN_T + 8.0;
        for (label, color, dash) in entries {
            let dash = dash.map_or(String::new(), |d| format!(" stroke-dasharray=\"{d}\""));
            self.body.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"2\"{4}/>\n",
                fmt(WIDTH - MARGIN_R - 150.0),
                fmt(WIDTH - MARGIN_R - 122.0),
                fmt(y),
                color,
                dash
            ));
            self.body.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                fmt(WIDTH - MARGIN_R - 116.0),
                fmt(y + 4.0),
                esc(label)
            ));
            y += 16.0;
        }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn fmt_tick(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e7 {
        format!("{}", v as i64)
    } else {
        format!("{v:.2}")
    }
}

/// Strain against arc position, one line per frame (later frames darker via
/// the palette cycle). Fails on an empty series before touching any file.
pub fn strain_plot_svg(series: &FrameSeries, title: &str) -> Result<String> {
    series.validate()?;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for frame in &series.frames {
        for &s in &frame.profile.samples {
            y_min = y_min.min(s);
            y_max = y_max.max(s);
        }
    }
    let first = &series.frames[0].profile;
    let x_min = first.gauge_position_mm(0);
    let x_max = first.gauge_position_mm(first.samples.len() - 1);
    let frame2d = Frame2D::padded(x_min, x_max, y_min, y_max);

    let mut svg = Svg::new(title);
    svg.axes(&frame2d, "arc position (mm)", "strain (ue)");
    let mut legend = Vec::new();
    for (i, frame) in series.frames.iter().enumerate() {
        let pts: Vec<(f64, f64)> = frame
            .profile
            .samples
            .iter()
            .enumerate()
            .map(|(g, &s)| (frame.profile.gauge_position_mm(g), s))
            .collect();
        let color = PALETTE[i % PALETTE.len()];
        svg.polyline(&frame2d, &pts, color, 1.2, None);
        if series.frames.len() <= PALETTE.len() {
            legend.push((format!("depth {:.0} mm", frame.depth_mm), color, None));
        }
    }
    svg.legend(&legend);
    Ok(svg.finish())
}

/// Reconstructed shapes overlaid on the planned centerline, with channel
/// walls offset `half_width_mm` to each side of the plan. Aspect ratio is
/// locked so circles look like circles.
pub fn shape_overlay_svg(
    measured: &[(&str, &PlanarShape)],
    plan: &PlanarShape,
    half_width_mm: f64,
    title: &str,
) -> Result<String> {
    if measured.is_empty() {
        return Err(Error::domain("no shapes to plot"));
    }
    if !half_width_mm.is_finite() || half_width_mm < 0.0 {
        return Err(Error::domain(format!(
            "wall half-width must be nonnegative, got {half_width_mm}"
        )));
    }
    let wall = |sign: f64| -> Vec<(f64, f64)> {
        plan.points
            .iter()
            .map(|p| {
                (
                    p.x_mm - sign * half_width_mm * p.theta_rad.sin(),
                    p.y_mm + sign * half_width_mm * p.theta_rad.cos(),
                )
            })
            .collect()
    };
    let walls = [wall(1.0), wall(-1.0)];

    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    let mut take = |x: f64, y: f64| {
        x_min = x_min.min(x);
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    };
    for w in &walls {
        for &(x, y) in w {
            take(x, y);
        }
    }
    for (_, shape) in measured {
        for p in &shape.points {
            take(p.x_mm, p.y_mm);
        }
    }
    let mut frame2d = Frame2D::padded(x_min, x_max, y_min, y_max);
    frame2d.equalize_aspect();

    let mut svg = Svg::new(title);
    svg.axes(&frame2d, "x (mm)", "y (mm)");
    let plan_pts: Vec<(f64, f64)> = plan.points.iter().map(|p| (p.x_mm, p.y_mm)).collect();
    for w in &walls {
        svg.polyline(&frame2d, w, "#999999", 1.0, None);
    }
    svg.polyline(&frame2d, &plan_pts, "#222222", 1.2, Some("6 4"));
    let mut legend: Vec<(String, &str, Option<&str>)> = vec![
        ("plan".into(), "#222222", Some("6 4")),
        ("walls".into(), "#999999", None),
    ];
    for (i, (label, shape)) in measured.iter().enumerate() {
        let pts: Vec<(f64, f64)> = shape.points.iter().map(|p| (p.x_mm, p.y_mm)).collect();
        let color = PALETTE[i % PALETTE.len()];
        svg.polyline(&frame2d, &pts, color, 1.6, None);
        if measured.len() <= PALETTE.len() {
            legend.push((label.to_string(), color, None));
        }
    }
    svg.legend(&legend);
    Ok(svg.finish())
}

/// Write SVG text to `path`.
pub fn write_svg(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}

// ====================================================================
// Tests
// ====================================================================
