//! SVG frame rendering.

use std::fmt::Write as _;

use super::FrameLog;
use crate::camera::Box2D;
use crate::fusion::Provenance;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// `[rows, cols]`
    pub image_size: [usize; 2],
    pub stickman: bool,
    /// frames below this lighting get stick figures when enabled
    pub stickman_lighting: f64,
    pub dark_background: bool,
    pub show_truth: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            image_size: [1536, 2048],
            stickman: true,
            stickman_lighting: 0.3,
            dark_background: true,
            show_truth: false,
        }
    }
}

/// Head circle plus five segments (spine, two arms, two legs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stickman {
    pub head: (f64, f64, f64),
    pub segments: [[f64; 4]; 5],
}

/// Stick figure fitted inside `b`.
pub fn stickman_segments(b: &Box2D<f64>) -> Stickman {
    let (w, h) = (b.width(), b.height());
    let cx = b.u_min + 0.5 * w;
    let r = (0.1 * h).min(0.4 * w);
    let cy = b.v_min + r + 0.02 * h;
    let neck = cy + r;
    let shoulder = neck + 0.08 * h;
    let hip = b.v_min + 0.6 * h;
    Stickman {
        head: (cx, cy, r),
        segments: [
            [cx, neck, cx, hip],
            [cx, shoulder, b.u_min + 0.1 * w, b.v_min + 0.45 * h],
            [cx, shoulder, b.u_max - 0.1 * w, b.v_min + 0.45 * h],
            [cx, hip, b.u_min + 0.15 * w, b.v_max],
            [cx, hip, b.u_max - 0.15 * w, b.v_max],
        ],
    }
}

/// Shortest decimal form with at most two fractional digits.
fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn style(p: Provenance) -> (&'static str, &'static str) {
    match p {
        Provenance::Image => ("#3ddc84", ""),
        Provenance::Radar => ("#4aa3ff", " stroke-dasharray=\"12,6\""),
        Provenance::Recovered => ("#ffa629", " stroke-dasharray=\"3,6\""),
    }
}

pub fn render_frame_svg(frame: &FrameLog, opts: &RenderOptions) -> String {
    let [rows, cols] = opts.image_size;
    let (bg, fg) = if opts.dark_background {
        ("#101014", "#e8e8e8")
    } else {
        ("#ffffff", "#202020")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{cols}\" height=\"{rows}\" viewBox=\"0 0 {cols} {rows}\">"
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{cols}\" height=\"{rows}\" fill=\"{bg}\"/>"
    );
    if opts.show_truth {
        for t in &frame.truth {
            let b = &t.bbox;
            let _ = writeln!(
                s,
                "<rect class=\"truth\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#888888\" stroke-width=\"1\"/>",
                num(b.u_min),
                num(b.v_min),
                num(b.width()),
                num(b.height())
            );
        }
    }
    let draw_figures = opts.stickman && frame.lighting < opts.stickman_lighting;
    for d in &frame.detections {
        let b = &d.bbox;
        let (color, dash) = style(d.provenance);
        let _ = writeln!(
            s,
            "<rect class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"3\"{dash}/>",
            d.provenance.as_str(),
            num(b.u_min),
            num(b.v_min),
            num(b.width()),
            num(b.height())
        );
        if draw_figures {
            let m = stickman_segments(b);
            let (cx, cy, r) = m.head;
            let _ = write!(
                s,
                "<g class=\"stickman\" stroke=\"{fg}\" stroke-width=\"2\" fill=\"none\"><circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                num(cx),
                num(cy),
                num(r)
            );
            for [x1, y1, x2, y2] in m.segments {
                let _ = write!(
                    s,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    num(x1),
                    num(y1),
                    num(x2),
                    num(y2)
                );
            }
            let _ = writeln!(s, "</g>");
        }
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\" font-family=\"monospace\" font-size=\"20\">{} {:.2}</text>",
            num(b.u_min),
            num((b.v_min - 6.0).max(18.0)),
            d.provenance.as_str(),
            d.confidence
        );
    }
    s.push_str("</svg>\n");
    s
}
