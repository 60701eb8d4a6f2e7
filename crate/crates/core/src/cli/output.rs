//! Deterministic serialization: JSON and CSV floats in `{:.16e}` (17
//! significant digits) and a small SVG emitter.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
    All,
}

impl Format {
    pub fn admits(self, kind: Format) -> bool {
        self == Format::All || self == kind
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub kind: Format,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn json<T: Serialize>(name: &str, value: &T) -> Self {
        Self {
            name: name.into(),
            kind: Format::Json,
            bytes: to_json(value),
        }
    }

    pub fn csv(name: &str, text: String) -> Self {
        Self {
            name: name.into(),
            kind: Format::Csv,
            bytes: text.into_bytes(),
        }
    }

    pub fn svg(name: &str, text: String) -> Self {
        Self {
            name: name.into(),
            kind: Format::Svg,
            bytes: text.into_bytes(),
        }
    }
}

struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        CompactFormatter.write_f32(w, v)
    }
}

/// Compact JSON with a trailing newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser).expect("serializing to memory");
    out.push(b'\n');
    out
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Builds CSV text from a header and rows of already formatted cells.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 48.0;

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64>) -> Self {
        let (mut x0, mut x1) = bounds(xs);
        let (_, mut y1) = bounds(ys);
        if !(x1 > x0) {
            x0 -= 1.0;
            x1 += 1.0;
        }
        if !(y1 > 0.0) {
            y1 = 1.0;
        }
        Self { x0, x1, y0: 0.0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y0) / (self.y1 - self.y0) * (H - 2.0 * PAD)
    }

    fn open(&self, title: &str) -> String {
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
        );
        let _ = writeln!(s, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"24\" font-size=\"14\" text-anchor=\"middle\">{}</text>",
            W / 2.0,
            escape(title)
        );
        let (bx, by) = (self.px(self.x0), self.py(self.y0));
        let _ = writeln!(
            s,
            "<path d=\"M{bx:.2} {:.2} L{bx:.2} {by:.2} L{:.2} {by:.2}\" stroke=\"black\" fill=\"none\"/>",
            self.py(self.y1),
            self.px(self.x1)
        );
        for (x, y, anchor, text) in [
            (bx, by + 16.0, "start", fmt_tick(self.x0)),
            (self.px(self.x1), by + 16.0, "end", fmt_tick(self.x1)),
            (bx - 4.0, by, "end", fmt_tick(self.y0)),
            (bx - 4.0, self.py(self.y1) + 4.0, "end", fmt_tick(self.y1)),
        ] {
            let _ = writeln!(
                s,
                "<text x=\"{x:.2}\" y=\"{y:.2}\" font-size=\"11\" text-anchor=\"{anchor}\">{text}</text>"
            );
        }
        s
    }
}

fn bounds(v: impl Iterator<Item = f64>) -> (f64, f64) {
    v.filter(|x| x.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)))
}

fn fmt_tick(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A polyline through `curve` plus vertical stems at `stems`.
pub fn line_plot(title: &str, curve: &[(f64, f64)], stems: &[(f64, f64)]) -> String {
    let all = curve.iter().chain(stems);
    let f = Frame::new(all.clone().map(|p| p.0), all.map(|p| p.1));
    let mut s = f.open(title);
    if !curve.is_empty() {
        let pts: Vec<String> = curve
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
            .collect();
        let _ = writeln!(
            s,
            "<polyline points=\"{}\" stroke=\"steelblue\" fill=\"none\"/>",
            pts.join(" ")
        );
    }
    for &(x, y) in stems {
        let (px, base, top) = (f.px(x), f.py(0.0), f.py(y));
        let _ = writeln!(
            s,
            "<line x1=\"{px:.2}\" y1=\"{base:.2}\" x2=\"{px:.2}\" y2=\"{top:.2}\" stroke=\"firebrick\"/>"
        );
        let _ = writeln!(s, "<circle cx=\"{px:.2}\" cy=\"{top:.2}\" r=\"3\" fill=\"firebrick\"/>");
    }
    s.push_str("</svg>\n");
    s
}

/// Histogram of `values` with `bins` equal-width bins.
pub fn histogram(title: &str, values: &[f64], bins: usize) -> String {
    let (lo, hi) = bounds(values.iter().copied());
    let bins = bins.max(1);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0usize; bins];
    for &v in values.iter().filter(|v| v.is_finite()) {
        counts[(((v - lo) / width) as usize).min(bins - 1)] += 1;
    }
    let lo = if lo.is_finite() { lo } else { 0.0 };
    let edges = (0..=bins).map(|k| lo + k as f64 * width);
    let f = Frame::new(edges, counts.iter().map(|&c| c as f64));
    let mut s = f.open(title);
    for (k, &c) in counts.iter().enumerate() {
        let (x0, x1) = (f.px(lo + k as f64 * width), f.px(lo + (k + 1) as f64 * width));
        let (top, base) = (f.py(c as f64), f.py(0.0));
        let _ = writeln!(
            s,
            "<rect x=\"{x0:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\" stroke=\"white\"/>",
            x1 - x0,
            base - top
        );
    }
    s.push_str("</svg>\n");
    s
}
