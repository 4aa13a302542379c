use std::fmt::Write as _;

use super::ShapeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for ShapeFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ShapeFormat::Csv),
            "json" => Ok(ShapeFormat::Json),
            "svg" => Ok(ShapeFormat::Svg),
            other => Err(format!("unknown shape format `{other}`")),
        }
    }
}

pub fn export_shape(series: &ShapeSeries, format: ShapeFormat) -> Vec<u8> {
    match format {
        ShapeFormat::Csv => to_csv(series).into_bytes(),
        ShapeFormat::Json => {
            let mut s = serde_json::to_string_pretty(series).expect("series serializes");
            s.push('\n');
            s.into_bytes()
        }
        ShapeFormat::Svg => to_svg(series).into_bytes(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn to_csv(series: &ShapeSeries) -> String {
    let mut out = String::from("step,label");
    for prefix in ["value", "surprise", "suspense"] {
        for c in &series.characters {
            write!(out, ",{}", csv_field(&format!("{prefix}_{c}"))).unwrap();
        }
    }
    out.push('\n');
    for (t, s) in series.steps.iter().enumerate() {
        write!(out, "{t},{}", csv_field(&s.label)).unwrap();
        for col in [&s.values, &s.surprise, &s.suspense] {
            for x in col {
                write!(out, ",{x}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn to_svg(series: &ShapeSeries) -> String {
    let n = series.steps.len();
    let (mut lo, mut hi) = series
        .steps
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let x = |t: usize| {
        if n <= 1 {
            W / 2.0
        } else {
            PAD + (W - 2.0 * PAD) * t as f64 / (n - 1) as f64
        }
    };
    let y = |v: f64| H - PAD - (H - 2.0 * PAD) * (v - lo) / (hi - lo);

    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#).unwrap();
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r##"<line x1="{PAD}" y1="{b}" x2="{r}" y2="{b}" stroke="#888"/>"##,
        b = H - PAD,
        r = W - PAD
    )
    .unwrap();
    writeln!(out, r##"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{b}" stroke="#888"/>"##, b = H - PAD).unwrap();
    writeln!(out, r#"<text x="4" y="{:.2}" font-size="11">{hi:.2}</text>"#, PAD + 4.0).unwrap();
    writeln!(out, r#"<text x="4" y="{:.2}" font-size="11">{lo:.2}</text>"#, H - PAD).unwrap();
    for (t, s) in series.steps.iter().enumerate() {
        let label = if t == 0 { "start" } else { s.label.as_str() };
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
            x(t),
            H - PAD + 16.0,
            xml_escape(label)
        )
        .unwrap();
    }
    for (i, c) in series.characters.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = series
            .steps
            .iter()
            .enumerate()
            .map(|(t, s)| format!("{:.2},{:.2}", x(t), y(s.values[i])))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"><title>{}</title></polyline>"#,
            pts.join(" "),
            xml_escape(c)
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="12" fill="{color}">{}</text>"#,
            W - PAD - 80.0,
            PAD + 14.0 * i as f64,
            xml_escape(c)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
