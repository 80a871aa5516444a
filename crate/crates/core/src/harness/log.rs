//! Detection log CSV.
//!
//! Comment lines carry the schema version and run metadata; every frame
//! contributes one `frame` row followed by its `truth` and `det` rows.

use std::io::{BufRead, BufReader, Read, Write};

use super::Mode;
use crate::camera::Box2D;
use crate::error::{Error, Result};
use crate::fusion::{Provenance, RefinedDetection};
use crate::simulator::FrameTruth;

pub const LOG_SCHEMA_VERSION: u32 = 1;

const COLUMNS: [&str; 12] = [
    "frame",
    "kind",
    "u_min",
    "v_min",
    "u_max",
    "v_max",
    "confidence",
    "keep_score",
    "provenance",
    "identity",
    "target_id",
    "value",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoggedTruth {
    pub id: u32,
    pub bbox: Box2D<f64>,
    pub occlusion: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameLog {
    pub frame: usize,
    pub lighting: f64,
    /// targets visible in the image
    pub truth: Vec<LoggedTruth>,
    pub detections: Vec<RefinedDetection>,
}

impl FrameLog {
    pub fn new(truth: &FrameTruth, detections: Vec<RefinedDetection>) -> Self {
        Self {
            frame: truth.frame,
            lighting: truth.lighting,
            truth: truth
                .targets
                .iter()
                .filter_map(|t| {
                    t.box2d.map(|bbox| LoggedTruth {
                        id: t.id,
                        bbox,
                        occlusion: t.occlusion,
                    })
                })
                .collect(),
            detections,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionLog {
    pub scene: String,
    pub seed: u64,
    pub mode: Mode,
    pub frames: Vec<FrameLog>,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("detection log line {line}: {msg}"))
}

impl DetectionLog {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "# schema_version={LOG_SCHEMA_VERSION}")?;
        writeln!(w, "# scene={}", self.scene)?;
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# mode={}", self.mode)?;
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(COLUMNS)?;
        let f4 = |v: f64| format!("{v:.4}");
        let b = |b: &Box2D<f64>| [f4(b.u_min), f4(b.v_min), f4(b.u_max), f4(b.v_max)];
        for fr in &self.frames {
            let frame = fr.frame.to_string();
            wr.write_record([
                &frame,
                "frame",
                "",
                "",
                "",
                "",
                "",
                "",
                "",
                "",
                "",
                &f4(fr.lighting),
            ])?;
            for t in &fr.truth {
                let [u0, v0, u1, v1] = b(&t.bbox);
                wr.write_record([
                    &frame,
                    "truth",
                    &u0,
                    &v0,
                    &u1,
                    &v1,
                    "",
                    "",
                    "",
                    "",
                    &t.id.to_string(),
                    &f4(t.occlusion),
                ])?;
            }
            for det in &fr.detections {
                let [u0, v0, u1, v1] = b(&det.bbox);
                wr.write_record([
                    &frame,
                    "det",
                    &u0,
                    &v0,
                    &u1,
                    &v1,
                    &f4(det.confidence),
                    &f4(det.keep_score),
                    det.provenance.as_str(),
                    &det.identity.map_or_else(String::new, |i| i.to_string()),
                    "",
                    "",
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut reader = BufReader::new(r);
        let mut meta = std::collections::BTreeMap::new();
        let mut line = String::new();
        let mut n_comment = 0;
        let mut body = String::new();
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            if let Some(rest) = line.strip_prefix('#') {
                n_comment += 1;
                if let Some((k, v)) = rest.trim().split_once('=') {
                    meta.insert(k.trim().to_string(), v.trim().to_string());
                }
            } else {
                body.push_str(&line);
                reader.read_to_string(&mut body)?;
                break;
            }
        }
        match meta.get("schema_version").map(String::as_str) {
            Some(v) if v == LOG_SCHEMA_VERSION.to_string() => {}
            other => {
                return Err(Error::Parse(format!(
                    "unsupported detection log schema_version {other:?}"
                )))
            }
        }
        let mode = meta.get("mode").map_or(Ok(Mode::Fusion), |m| m.parse())?;
        let seed = meta.get("seed").map_or(Ok(0), |s| {
            s.parse().map_err(|e| Error::Parse(format!("seed: {e}")))
        })?;
        let mut log = DetectionLog {
            scene: meta.get("scene").cloned().unwrap_or_default(),
            seed,
            mode,
            frames: Vec::new(),
        };

        let mut rd = csv::Reader::from_reader(body.as_bytes());
        for (i, rec) in rd.records().enumerate() {
            let rec = rec?;
            let ln = n_comment + i + 2;
            let get = |c: usize| rec.get(c).unwrap_or("");
            let num = |c: usize| -> Result<f64> {
                get(c)
                    .parse()
                    .map_err(|e| parse_err(ln, format!("{}: {e}", COLUMNS[c])))
            };
            let bbox = || -> Result<Box2D<f64>> {
                Box2D::new(num(2)?, num(3)?, num(4)?, num(5)?).map_err(|e| parse_err(ln, e))
            };
            let frame: usize = get(0)
                .parse()
                .map_err(|e| parse_err(ln, format!("frame: {e}")))?;
            match get(1) {
                "frame" => {
                    if frame != log.frames.len() {
                        return Err(parse_err(
                            ln,
                            format!("expected frame {}, got {frame}", log.frames.len()),
                        ));
                    }
                    log.frames.push(FrameLog {
                        frame,
                        lighting: num(11)?,
                        truth: Vec::new(),
                        detections: Vec::new(),
                    });
                }
                kind @ ("truth" | "det") => {
                    let fr = log
                        .frames
                        .last_mut()
                        .filter(|f| f.frame == frame)
                        .ok_or_else(|| parse_err(ln, format!("{kind} row before its frame row")))?;
                    if kind == "truth" {
                        fr.truth.push(LoggedTruth {
                            id: get(10)
                                .parse()
                                .map_err(|e| parse_err(ln, format!("target_id: {e}")))?,
                            bbox: bbox()?,
                            occlusion: num(11)?,
                        });
                    } else {
                        let identity = match get(9) {
                            "" => None,
                            s => Some(
                                s.parse()
                                    .map_err(|e| parse_err(ln, format!("identity: {e}")))?,
                            ),
                        };
                        fr.detections.push(RefinedDetection {
                            bbox: bbox()?,
                            confidence: num(6)?,
                            keep_score: num(7)?,
                            provenance: Provenance::parse(get(8))
                                .ok_or_else(|| parse_err(ln, format!("provenance '{}'", get(8))))?,
                            identity,
                        });
                    }
                }
                other => return Err(parse_err(ln, format!("unknown row kind '{other}'"))),
            }
        }
        Ok(log)
    }
}
