//! File formats.
//!
//! * 2D masks: binary PGM, plain (`P2`) or raw (`P5`), maxval up to 65535.
//!   Zero samples are outside the domain. Points are `(row, col)`.
//! * 3D masks: a JSON header `{"dims": [nx, ny, nz]}` plus a raw body of
//!   `nx·ny·nz` bytes with x varying fastest. Points are `(z, y, x)`.
//! * Seeds: JSON `{"seeds": [{"id": "a", "points": [[r, c], ...]}, ...]}`;
//!   list order is the initialisation order.
//! * Label maps: JSON with `dims` (point axis order), a legend and the
//!   row-major `values`. Value 0 is unlabeled, 1 is the boundary, seeds are
//!   numbered from 2 in seed-list order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDomain, Point, PointSet, Shape};
use crate::growers::{Cause, GrowResult, Seed, SeedList, TraceEvent};

pub const LABEL_UNLABELED: u32 = 0;
pub const LABEL_BOUNDARY: u32 = 1;
pub const LABEL_FIRST_SEED: u32 = 2;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.into(),
        }
    }

    /// Skips whitespace and `#` comments.
    fn skip_blank(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_blank();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                offset: start,
                message: format!("{what} is out of range"),
            })
    }
}

/// Decodes a `P2` or `P5` image into a domain: nonzero samples are in `Ω`.
pub fn read_mask_2d(bytes: &[u8]) -> Result<GridDomain> {
    let mut cur = Cursor { bytes, pos: 0 };
    let binary = match bytes.get(..2) {
        Some(b"P2") => false,
        Some(b"P5") => true,
        _ => return Err(cur.err("expected magic `P2` or `P5`")),
    };
    cur.pos = 2;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(cur.err("image extents must be positive"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(cur.err(format!("maxval {maxval} is outside 1..=65535")));
    }
    let count = width
        .checked_mul(height)
        .ok_or_else(|| cur.err("image size overflows"))?;

    let mut mask = Vec::with_capacity(count);
    if binary {
        if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
            return Err(cur.err("expected a single whitespace byte after maxval"));
        }
        cur.pos += 1;
        let sample = if maxval < 256 { 1 } else { 2 };
        let body = &bytes[cur.pos..];
        if body.len() < count * sample {
            return Err(Error::Parse {
                offset: bytes.len(),
                message: format!(
                    "truncated body: {} bytes, need {}",
                    body.len(),
                    count * sample
                ),
            });
        }
        for k in 0..count {
            let v = if sample == 1 {
                body[k] as u64
            } else {
                u16::from_be_bytes([body[2 * k], body[2 * k + 1]]) as u64
            };
            if v > maxval {
                return Err(Error::Parse {
                    offset: cur.pos + k * sample,
                    message: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            mask.push(v != 0);
        }
    } else {
        for _ in 0..count {
            let start = cur.pos;
            let v = cur.number("sample")?;
            if v > maxval {
                return Err(Error::Parse {
                    offset: start,
                    message: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            mask.push(v != 0);
        }
    }
    GridDomain::new(vec![height, width], mask)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PgmEncoding {
    Plain,
    Raw,
}

/// Encodes a 2D domain as an 8-bit PGM with samples 0 and 255.
pub fn write_mask_2d(domain: &GridDomain, encoding: PgmEncoding) -> Result<Vec<u8>> {
    let [height, width] = domain.dims() else {
        return Err(Error::Format(format!(
            "PGM needs a 2D domain, got dimension {}",
            domain.dim()
        )));
    };
    let magic = match encoding {
        PgmEncoding::Plain => "P2",
        PgmEncoding::Raw => "P5",
    };
    let mut out = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    match encoding {
        PgmEncoding::Raw => out.extend(domain.mask().iter().map(|&b| if b { 255u8 } else { 0 })),
        PgmEncoding::Plain => {
            for row in domain.mask().chunks(*width) {
                let line: Vec<&str> = row.iter().map(|&b| if b { "255" } else { "0" }).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
    }
    Ok(out)
}

/// Header of a 3D mask.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeHeader {
    /// `[nx, ny, nz]`, x varying fastest in the body.
    pub dims: [usize; 3],
    /// Body file name relative to the header, if not the default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
}

pub fn read_volume_header(header: &[u8]) -> Result<VolumeHeader> {
    Ok(serde_json::from_slice(header)?)
}

pub fn read_mask_3d(header: &[u8], body: &[u8]) -> Result<GridDomain> {
    let VolumeHeader { dims: [nx, ny, nz], .. } = read_volume_header(header)?;
    let count = nx
        .checked_mul(ny)
        .and_then(|n| n.checked_mul(nz))
        .ok_or_else(|| Error::Format("volume size overflows".into()))?;
    if body.len() != count {
        return Err(Error::Parse {
            offset: body.len().min(count),
            message: format!("body has {} bytes, dims {nx}×{ny}×{nz} need {count}", body.len()),
        });
    }
    GridDomain::new(vec![nz, ny, nx], body.iter().map(|&b| b != 0).collect())
}

/// Header and body for a 3D domain; the body uses 0 and 255.
pub fn write_mask_3d(domain: &GridDomain) -> Result<(Vec<u8>, Vec<u8>)> {
    let [nz, ny, nx] = domain.dims() else {
        return Err(Error::Format(format!(
            "volume needs a 3D domain, got dimension {}",
            domain.dim()
        )));
    };
    let header = VolumeHeader {
        dims: [*nx, *ny, *nz],
        body: None,
    };
    let mut head = serde_json::to_vec(&header)?;
    head.push(b'\n');
    let body = domain.mask().iter().map(|&b| if b { 255u8 } else { 0 }).collect();
    Ok((head, body))
}

#[derive(Serialize, Deserialize)]
struct SeedFile {
    seeds: Vec<Seed>,
}

/// Parses a seed file and validates it against `domain`.
pub fn read_seeds(bytes: &[u8], domain: &GridDomain) -> Result<SeedList> {
    let file: SeedFile = serde_json::from_slice(bytes)?;
    for seed in &file.seeds {
        if let Some(p) = seed.points.iter().find(|p| p.dim() != domain.dim()) {
            return Err(Error::Format(format!(
                "seed `{}`: point {p} has {} coordinates, the image has {}",
                seed.id,
                p.dim(),
                domain.dim()
            )));
        }
    }
    let seeds = SeedList::new(file.seeds)?;
    seeds.validate(domain)?;
    Ok(seeds)
}

pub fn write_seeds(seeds: &SeedList) -> Result<Vec<u8>> {
    let file = SeedFile {
        seeds: seeds.seeds().to_vec(),
    };
    let mut out = serde_json::to_vec(&file)?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LegendEntry {
    Unlabeled { value: u32 },
    Boundary { value: u32 },
    Seed { value: u32, id: String },
}

impl LegendEntry {
    pub fn value(&self) -> u32 {
        match self {
            LegendEntry::Unlabeled { value }
            | LegendEntry::Boundary { value }
            | LegendEntry::Seed { value, .. } => *value,
        }
    }
}

/// A label map on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelFile {
    pub dims: Vec<usize>,
    pub legend: Vec<LegendEntry>,
    pub values: Vec<u32>,
}

impl LabelFile {
    pub fn from_result(result: &GrowResult) -> LabelFile {
        let table = file_values(result);
        LabelFile {
            dims: result.labels.shape().dims().to_vec(),
            legend: legend(result),
            values: result
                .labels
                .iter()
                .map(|l| l.map_or(LABEL_UNLABELED, |l| table[l as usize]))
                .collect(),
        }
    }

    pub fn parse(bytes: &[u8]) -> Result<LabelFile> {
        let file: LabelFile = serde_json::from_slice(bytes)?;
        file.validate()?;
        Ok(file)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec(self).expect("label files always serialize");
        out.push(b'\n');
        out
    }

    fn validate(&self) -> Result<()> {
        let shape = Shape::new(self.dims.clone())?;
        if shape.len() != self.values.len() {
            return Err(Error::Format(format!(
                "{} values for dims {:?}",
                self.values.len(),
                self.dims
            )));
        }
        let mut known: Vec<u32> = self.legend.iter().map(LegendEntry::value).collect();
        known.sort_unstable();
        if known.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Format("legend repeats a value".into()));
        }
        if let Some((k, v)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| known.binary_search(v).is_err())
        {
            return Err(Error::Format(format!(
                "value {v} at {} is not in the legend",
                shape.point_of(k)
            )));
        }
        Ok(())
    }

    pub fn shape(&self) -> Result<Shape> {
        Shape::new(self.dims.clone())
    }

    pub fn entry(&self, value: u32) -> Option<&LegendEntry> {
        self.legend.iter().find(|e| e.value() == value)
    }

    /// Points carrying `value`.
    pub fn points_with(&self, value: u32) -> Result<PointSet> {
        let shape = self.shape()?;
        Ok((0..self.values.len())
            .filter(|&i| self.values[i] == value)
            .map(|i| shape.point_of(i))
            .collect())
    }

    /// Seed regions in legend order.
    pub fn seed_blocks(&self) -> Result<Vec<(String, PointSet)>> {
        self.legend
            .iter()
            .filter_map(|e| match e {
                LegendEntry::Seed { value, id } => Some((id.clone(), *value)),
                _ => None,
            })
            .map(|(id, value)| Ok((id, self.points_with(value)?)))
            .collect()
    }

    pub fn boundary_points(&self) -> Result<PointSet> {
        match self
            .legend
            .iter()
            .find(|e| matches!(e, LegendEntry::Boundary { .. }))
        {
            Some(e) => self.points_with(e.value()),
            None => Ok(PointSet::new()),
        }
    }

    /// Points whose legend entries differ between the two files. Compares
    /// by legend meaning, not raw value.
    pub fn diff(&self, other: &LabelFile) -> Result<PointSet> {
        if self.dims != other.dims {
            return Err(Error::Format(format!(
                "dims differ: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        let shape = self.shape()?;
        let meaning = |f: &LabelFile, v: u32| match f.entry(v) {
            Some(LegendEntry::Seed { id, .. }) => (2u8, Some(id.clone())),
            Some(LegendEntry::Boundary { .. }) => (1, None),
            _ => (0, None),
        };
        Ok((0..self.values.len())
            .filter(|&i| meaning(self, self.values[i]) != meaning(other, other.values[i]))
            .map(|i| shape.point_of(i))
            .collect())
    }
}

/// Run-local label → file value.
fn file_values(result: &GrowResult) -> Vec<u32> {
    result
        .label_ids
        .iter()
        .map(|id| match id {
            None => LABEL_BOUNDARY,
            Some(id) => {
                let k = result
                    .seed_order
                    .iter()
                    .position(|s| s == id)
                    .expect("every region comes from a listed seed");
                LABEL_FIRST_SEED + k as u32
            }
        })
        .collect()
}

fn legend(result: &GrowResult) -> Vec<LegendEntry> {
    let mut legend = vec![LegendEntry::Unlabeled {
        value: LABEL_UNLABELED,
    }];
    if result.boundary.is_some() {
        legend.push(LegendEntry::Boundary {
            value: LABEL_BOUNDARY,
        });
    }
    legend.extend(result.seed_order.iter().enumerate().map(|(k, id)| LegendEntry::Seed {
        value: LABEL_FIRST_SEED + k as u32,
        id: id.clone(),
    }));
    legend
}

pub fn write_labels(result: &GrowResult) -> Vec<u8> {
    LabelFile::from_result(result).to_bytes()
}

/// Replays a growth trace into label-map snapshots: one after every
/// `every`-th growth, plus the final map when the growth count is not a
/// multiple of `every` (or is zero). Skip events are ignored.
pub fn write_trace_frames(result: &GrowResult, trace: &[TraceEvent], every: u64) -> Result<Vec<Vec<u8>>> {
    if every == 0 {
        return Err(Error::Format("frame interval must be at least 1".into()));
    }
    let table = file_values(result);
    let mut frame = LabelFile {
        dims: result.labels.shape().dims().to_vec(),
        legend: legend(result),
        values: vec![LABEL_UNLABELED; result.labels.len()],
    };
    let mut frames = Vec::new();
    let mut growths = 0u64;
    for event in trace.iter().filter(|e| e.cause != Cause::Skip) {
        frame.values[event.site] = table[event.label as usize];
        growths += 1;
        if growths.is_multiple_of(every) {
            frames.push(frame.to_bytes());
        }
    }
    if growths == 0 || !growths.is_multiple_of(every) {
        frames.push(frame.to_bytes());
    }
    Ok(frames)
}

/// Parses a point written as comma-separated integers, e.g. `3,4`.
pub fn parse_point(text: &str) -> Result<Point> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Format(format!("`{text}` is not a point")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Point::new)
}
