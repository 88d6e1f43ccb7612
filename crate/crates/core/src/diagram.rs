//! Space-time diagrams of traces as SVG: tape positions left to right, time
//! downwards, one polyline per head.

use std::fmt::Write as _;

use crate::model::MultiSystem;
use crate::sim::{Outcome, Trace};

const PALETTE: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Geometry and per-head styling of a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramSpec {
    pub cell_width: u32,
    pub step_height: u32,
    pub margin: u32,
    /// Stroke color per automaton.
    pub colors: Vec<String>,
    /// Horizontal shift per automaton, so that heads on one cell stay apart.
    pub tracks: Vec<i32>,
}

impl DiagramSpec {
    pub fn for_system(system: &MultiSystem) -> Self {
        let n = system.len();
        DiagramSpec {
            cell_width: 16,
            step_height: 8,
            margin: 24,
            colors: (0..n).map(|i| PALETTE[i % PALETTE.len()].to_string()).collect(),
            tracks: (0..n).map(|i| 3 * i as i32 - 3 * (n as i32 - 1) / 2).collect(),
        }
    }

    fn x(&self, pos: i64) -> i64 {
        self.margin as i64 + pos * self.cell_width as i64 + self.cell_width as i64 / 2
    }

    fn y(&self, t: usize) -> i64 {
        self.margin as i64 + (t as i64) * self.step_height as i64
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// The SVG document for `trace`.
pub fn render(system: &MultiSystem, trace: &Trace, spec: &DiagramSpec) -> String {
    let n = trace.input_length as i64;
    let last = trace.steps.len().saturating_sub(1);
    let width = 2 * spec.margin as i64 + (n + 2) * spec.cell_width as i64;
    let height = 2 * spec.margin as i64 + last as i64 * spec.step_height as i64 + 16;
    let (top, bottom) = (spec.y(0), spec.y(last));
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">"#
    );
    let _ = writeln!(out, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    for (pos, label) in [(0, "0".to_string()), (n + 1, "N+1".to_string())] {
        let x = spec.x(pos);
        let _ = writeln!(
            out,
            r#"<line class="rail" x1="{x}" y1="{top}" x2="{x}" y2="{bottom}" stroke="black" stroke-width="2"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" text-anchor="middle">{label}</text>"#,
            top - 8
        );
    }
    for event in &trace.broadcast_events {
        let y = spec.y(event.time);
        let _ = writeln!(
            out,
            r##"<line class="broadcast" x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#888" stroke-dasharray="4 3"/>"##,
            spec.x(0),
            spec.x(n + 1)
        );
    }
    for (i, a) in system.automata().iter().enumerate() {
        let color = &spec.colors[i];
        let dx = spec.tracks[i] as i64;
        let points: Vec<String> = trace
            .steps
            .iter()
            .enumerate()
            .map(|(t, c)| format!("{},{}", spec.x(c.pi[i]) + dx, spec.y(t)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="head" data-automaton="{}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            escape(a.name()),
            points.join(" ")
        );
        for event in trace.broadcast_events.iter().filter(|e| e.broadcasters.contains(&i)) {
            let c = &trace.steps[event.time];
            let _ = writeln!(
                out,
                r#"<circle class="mark" cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                spec.x(c.pi[i]) + dx,
                spec.y(event.time)
            );
        }
    }
    let verdict = match trace.outcome {
        Outcome::Accepted(t) => format!("N={n} accepted at {t}"),
        Outcome::RejectedLoop(t) => format!("N={n} rejected (loop) at {t}"),
    };
    let _ = writeln!(out, r#"<text x="{}" y="{}">{verdict}</text>"#, spec.margin, height - 6);
    out.push_str("</svg>\n");
    out
}
