//! Versioned TOML inputs: system descriptions, points, witnesses and
//! per-command parameter files. Rationals are `"p/q"` strings.

use crate::error::{CliError, CliResult};
use resfin_core::free_group::{BoundaryPoint, Word};
use resfin_core::rational::{self, Rational};
use resfin_core::system::{
    CompactPoint, CompactifiedZ, End, FiniteSample, GroupRingElement, PeriodicConfig, Polytope, SampleImage,
    SampleMetric, ShiftSpace, TorusPoint,
};
use resfin_core::{FiniteAction, Point, SystemDescriptor};
use sha2::{Digest, Sha256};
use std::path::Path;
use toml::{Table, Value};

pub const FORMAT_VERSION: i64 = 1;

/// Raw bytes of one input together with the name it was given under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Input {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Input {
    pub fn new(name: impl Into<String>, bytes: impl Into<Vec<u8>>) -> Self {
        Self { name: name.into(), bytes: bytes.into() }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(Self::new(path.display().to_string(), bytes))
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }

    pub fn text(&self) -> CliResult<&str> {
        std::str::from_utf8(&self.bytes).map_err(|_| CliError::Parse {
            file: self.name.clone(),
            line: None,
            field: "(file)".into(),
            message: "not UTF-8 text".into(),
        })
    }
}

/// A parsed TOML document with field-level error reporting.
pub struct Doc<'a> {
    input: &'a Input,
    text: &'a str,
    pub table: Table,
}

impl<'a> Doc<'a> {
    pub fn parse(input: &'a Input) -> CliResult<Self> {
        let text = input.text()?;
        let table: Table = toml::from_str(text).map_err(|e| CliError::Parse {
            file: input.name.clone(),
            line: e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1),
            field: "(syntax)".into(),
            message: e.message().to_string(),
        })?;
        let doc = Self { input, text, table };
        match doc.table.get("version") {
            None => Err(doc.err("version", "missing")),
            Some(Value::Integer(FORMAT_VERSION)) => Ok(doc),
            Some(Value::Integer(v)) => Err(CliError::UnsupportedVersion { file: input.name.clone(), version: *v }),
            Some(_) => Err(doc.err("version", "expected an integer")),
        }
    }

    fn line_of(&self, field: &str) -> Option<usize> {
        let key = field.split(['[', '.']).next().unwrap_or(field);
        self.text
            .lines()
            .position(|l| {
                let t = l.trim_start();
                t.strip_prefix(key).is_some_and(|r| r.trim_start().starts_with('='))
                    || t.trim_end() == format!("[{key}]")
                    || t.trim_end() == format!("[[{key}]]")
            })
            .map(|i| i + 1)
    }

    pub fn err(&self, field: &str, message: impl Into<String>) -> CliError {
        CliError::Parse {
            file: self.input.name.clone(),
            line: self.line_of(field),
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn core(&self, field: &str) -> impl Fn(resfin_core::Error) -> CliError + '_ {
        let field = field.to_string();
        move |e| self.err(&field, e.to_string())
    }

    pub fn opt(&self, field: &str) -> Option<&Value> {
        self.table.get(field)
    }

    pub fn value(&self, field: &str) -> CliResult<&Value> {
        self.opt(field).ok_or_else(|| self.err(field, "missing"))
    }

    pub fn string(&self, field: &str) -> CliResult<&str> {
        self.value(field)?.as_str().ok_or_else(|| self.err(field, "expected a string"))
    }

    pub fn usize(&self, field: &str) -> CliResult<usize> {
        self.to_usize(field, self.value(field)?)
    }

    pub fn usize_or(&self, field: &str, default: usize) -> CliResult<usize> {
        self.opt(field).map_or(Ok(default), |v| self.to_usize(field, v))
    }

    pub fn i64(&self, field: &str) -> CliResult<i64> {
        self.value(field)?.as_integer().ok_or_else(|| self.err(field, "expected an integer"))
    }

    pub fn bool_or(&self, field: &str, default: bool) -> CliResult<bool> {
        self.opt(field).map_or(Ok(default), |v| v.as_bool().ok_or_else(|| self.err(field, "expected a boolean")))
    }

    pub fn rational(&self, field: &str) -> CliResult<Rational> {
        self.to_rational(field, self.value(field)?)
    }

    pub fn rationals(&self, field: &str) -> CliResult<Vec<Rational>> {
        self.to_rationals(field, self.value(field)?)
    }

    pub fn usizes(&self, field: &str) -> CliResult<Vec<usize>> {
        self.array(field, self.value(field)?)?
            .iter()
            .enumerate()
            .map(|(i, v)| self.to_usize(&format!("{field}[{i}]"), v))
            .collect()
    }

    pub fn usize_rows(&self, field: &str) -> CliResult<Vec<Vec<usize>>> {
        self.array(field, self.value(field)?)?
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let f = format!("{field}[{i}]");
                self.array(&f, row)?.iter().enumerate().map(|(j, v)| self.to_usize(&format!("{f}[{j}]"), v)).collect()
            })
            .collect()
    }

    pub fn rational_rows(&self, field: &str) -> CliResult<Vec<Vec<Rational>>> {
        self.array(field, self.value(field)?)?
            .iter()
            .enumerate()
            .map(|(i, row)| self.to_rationals(&format!("{field}[{i}]"), row))
            .collect()
    }

    pub fn array<'v>(&self, field: &str, v: &'v Value) -> CliResult<&'v Vec<Value>> {
        v.as_array().ok_or_else(|| self.err(field, "expected an array"))
    }

    pub fn to_usize(&self, field: &str, v: &Value) -> CliResult<usize> {
        v.as_integer()
            .and_then(|i| usize::try_from(i).ok())
            .ok_or_else(|| self.err(field, "expected a nonnegative integer"))
    }

    pub fn to_rational(&self, field: &str, v: &Value) -> CliResult<Rational> {
        match v {
            Value::String(s) => rational::parse(s).ok_or_else(|| self.err(field, format!("bad rational {s:?}"))),
            Value::Integer(i) => Ok(rational::int(*i)),
            _ => Err(self.err(field, "expected a rational string \"p/q\"")),
        }
    }

    pub fn to_rationals(&self, field: &str, v: &Value) -> CliResult<Vec<Rational>> {
        self.array(field, v)?
            .iter()
            .enumerate()
            .map(|(i, x)| self.to_rational(&format!("{field}[{i}]"), x))
            .collect()
    }
}

/// A parsed system file: a compact system, or a bare finite action.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemFile {
    Descriptor(SystemDescriptor),
    Action(FiniteAction),
}

impl SystemFile {
    pub fn kind(&self) -> &'static str {
        match self {
            SystemFile::Descriptor(d) => d.kind(),
            SystemFile::Action(_) => "finite-action",
        }
    }

    pub fn descriptor(&self) -> CliResult<&SystemDescriptor> {
        match self {
            SystemFile::Descriptor(d) => Ok(d),
            SystemFile::Action(_) => Err(CliError::Usage("this command needs a compact system, not a finite action".into())),
        }
    }
}

fn parse_end(doc: &Doc, field: &str, v: &Value) -> CliResult<(usize, End)> {
    let s = v.as_str().ok_or_else(|| doc.err(field, "expected an end like \"0+\""))?;
    let (copy, sign) = s.split_at(s.len().saturating_sub(1));
    let end = match sign {
        "+" => End::Plus,
        "-" => End::Minus,
        _ => return Err(doc.err(field, format!("bad end {s:?}"))),
    };
    let copy = copy.parse().map_err(|_| doc.err(field, format!("bad copy index in {s:?}")))?;
    Ok((copy, end))
}

fn parse_image(doc: &Doc, field: &str, v: &Value) -> CliResult<SampleImage> {
    match v {
        Value::Integer(_) => Ok(SampleImage::Index(doc.to_usize(field, v)?)),
        Value::String(_) => Ok(SampleImage::Coordinate(doc.to_rational(field, v)?)),
        Value::Array(_) => Ok(SampleImage::Distances(doc.to_rationals(field, v)?)),
        _ => Err(doc.err(field, "expected an index, a coordinate or a distance row")),
    }
}

pub fn parse_system_doc(doc: &Doc) -> CliResult<SystemFile> {
    let kind = doc.string("kind")?;
    let d = match kind {
        "z-shift" | "fr-shift" => {
            let alphabet = doc.usize("alphabet")?;
            let rank = if kind == "z-shift" { 1 } else { doc.usize("rank")? };
            let mut forbidden = Vec::new();
            if let Some(v) = doc.opt("forbidden") {
                for (i, row) in doc.array("forbidden", v)?.iter().enumerate() {
                    let f = format!("forbidden[{i}]");
                    let xs: Vec<usize> =
                        doc.array(&f, row)?.iter().map(|x| doc.to_usize(&f, x)).collect::<CliResult<_>>()?;
                    match (kind, xs.as_slice()) {
                        ("z-shift", [a, b]) => forbidden.push((0, *a, *b)),
                        ("fr-shift", [g, a, b]) => forbidden.push((*g, *a, *b)),
                        _ => return Err(doc.err(&f, "expected [a, b] for z-shift or [gen, a, b] for fr-shift")),
                    }
                }
            }
            SystemDescriptor::Shift(ShiftSpace::new(alphabet, rank, forbidden).map_err(doc.core("forbidden"))?)
        }
        "fr-boundary" => SystemDescriptor::FrBoundary { rank: doc.usize("rank")? },
        "compactified-z" => {
            let copies = doc.usize_or("copies", 1)?;
            let mut gluing = Vec::new();
            if let Some(v) = doc.opt("gluing") {
                for (i, pair) in doc.array("gluing", v)?.iter().enumerate() {
                    let f = format!("gluing[{i}]");
                    match doc.array(&f, pair)?.as_slice() {
                        [a, b] => gluing.push((parse_end(doc, &f, a)?, parse_end(doc, &f, b)?)),
                        _ => return Err(doc.err(&f, "expected a pair of ends")),
                    }
                }
            }
            SystemDescriptor::CompactifiedZ(CompactifiedZ::new(copies, gluing).map_err(doc.core("gluing"))?)
        }
        "finite-sample" => {
            let metric = match doc.string("metric")? {
                "table" => SampleMetric::Table(doc.rational_rows("distances")?),
                "circle" => SampleMetric::Circle(doc.rationals("points")?),
                "line" => SampleMetric::Line(doc.rationals("points")?),
                other => return Err(doc.err("metric", format!("unknown metric {other:?}"))),
            };
            let field = if matches!(metric, SampleMetric::Table(_)) { "distances" } else { "points" };
            let mut maps = Vec::new();
            for (g, row) in doc.array("maps", doc.value("maps")?)?.iter().enumerate() {
                let f = format!("maps[{g}]");
                maps.push(
                    doc.array(&f, row)?
                        .iter()
                        .enumerate()
                        .map(|(i, v)| parse_image(doc, &format!("{f}[{i}]"), v))
                        .collect::<CliResult<_>>()?,
                );
            }
            let sample = FiniteSample::new(metric, maps).map_err(|e| {
                let msg = e.to_string();
                doc.err(if msg.contains("map") { "maps" } else { field }, msg)
            })?;
            SystemDescriptor::FiniteSample(sample)
        }
        "circle-rotation" => {
            // points k/q with the map k -> k + p, for alpha = p/q
            let alpha = doc.rational("alpha")?;
            let q: usize = alpha
                .denom()
                .try_into()
                .ok()
                .filter(|&q| q <= 1 << 20)
                .ok_or_else(|| doc.err("alpha", "denominator too large"))?;
            let p = rational::frac(&alpha).numer().try_into().unwrap_or(0usize);
            let points = (0..q as i64).map(|k| rational::q(k, q as i64)).collect();
            let table = (0..q).map(|k| (k + p) % q).collect();
            SystemDescriptor::FiniteSample(
                FiniteSample::exact(SampleMetric::Circle(points), vec![table]).map_err(doc.core("alpha"))?,
            )
        }
        "polytope" => SystemDescriptor::Polytope(
            Polytope::new(doc.rational_rows("vertices")?, doc.rational_rows("matrix")?, doc.rationals("offset")?)
                .map_err(doc.core("matrix"))?,
        ),
        "algebraic" => {
            let mut terms = Vec::new();
            for (i, t) in doc.array("f", doc.value("f")?)?.iter().enumerate() {
                let f = format!("f[{i}]");
                match doc.array(&f, t)?.as_slice() {
                    [Value::Integer(e), Value::Integer(c)] => terms.push((*e, *c)),
                    _ => return Err(doc.err(&f, "expected [exponent, coefficient]")),
                }
            }
            SystemDescriptor::Algebraic { f: GroupRingElement::new(terms), grid_period: doc.usize_or("grid_period", 6)? }
        }
        "finite-action" => {
            let action = FiniteAction::new(doc.usize("size")?, doc.usize_rows("generators")?)
                .map_err(doc.core("generators"))?;
            return Ok(SystemFile::Action(action));
        }
        other => return Err(doc.err("kind", format!("unknown system kind {other:?}"))),
    };
    Ok(SystemFile::Descriptor(d.revalidate().map_err(doc.core("kind"))?))
}

pub fn parse_system_file(input: &Input) -> CliResult<SystemFile> {
    parse_system_doc(&Doc::parse(input)?)
}

fn word_letters(doc: &Doc, field: &str, v: Option<&Value>) -> CliResult<Vec<resfin_core::free_group::Letter>> {
    let s = v.and_then(Value::as_str).unwrap_or("");
    Ok(Word::parse(s).map_err(doc.core(field))?.letters().to_vec())
}

/// Reads a point in the notation of the system's kind.
pub fn parse_point(doc: &Doc, field: &str, system: &SystemDescriptor, v: &Value) -> CliResult<Point> {
    let p = match (system, v) {
        (SystemDescriptor::FiniteSample(_), _) => Point::Sample(doc.to_usize(field, v)?),
        (SystemDescriptor::Shift(_), Value::Array(xs)) => {
            let word: Vec<usize> = xs.iter().map(|x| doc.to_usize(field, x)).collect::<CliResult<_>>()?;
            Point::Config(PeriodicConfig::periodic(&word).map_err(doc.core(field))?)
        }
        (SystemDescriptor::Shift(s), Value::Table(t)) => {
            if let Some(c) = t.get("constant") {
                Point::Config(PeriodicConfig::constant(s.rank(), doc.to_usize(field, c)?))
            } else {
                let get = |k: &str| t.get(k).ok_or_else(|| doc.err(field, format!("missing `{k}`")));
                let perms = doc
                    .array(field, get("perms")?)?
                    .iter()
                    .map(|r| doc.array(field, r)?.iter().map(|x| doc.to_usize(field, x)).collect())
                    .collect::<CliResult<_>>()?;
                let colors = doc.array(field, get("colors")?)?.iter().map(|x| doc.to_usize(field, x)).collect::<CliResult<_>>()?;
                let base = t.get("base").map_or(Ok(0), |b| doc.to_usize(field, b))?;
                Point::Config(PeriodicConfig::new(perms, base, colors).map_err(doc.core(field))?)
            }
        }
        (SystemDescriptor::FrBoundary { .. }, Value::Table(t)) => Point::Boundary(
            BoundaryPoint::new(word_letters(doc, field, t.get("prefix"))?, word_letters(doc, field, t.get("cycle"))?)
                .map_err(doc.core(field))?,
        ),
        (SystemDescriptor::CompactifiedZ(_), Value::Integer(n)) => Point::Compact(CompactPoint::int(*n)),
        (SystemDescriptor::CompactifiedZ(_), Value::String(s)) => match s.as_str() {
            "+inf" => Point::Compact(CompactPoint::plus_inf()),
            "-inf" => Point::Compact(CompactPoint::minus_inf()),
            _ => return Err(doc.err(field, format!("bad point {s:?}"))),
        },
        (SystemDescriptor::CompactifiedZ(_), Value::Table(t)) => {
            let copy = t.get("copy").map_or(Ok(0), |c| doc.to_usize(field, c))?;
            match (t.get("n"), t.get("end").and_then(Value::as_str)) {
                (Some(Value::Integer(n)), None) => Point::Compact(CompactPoint::Int { copy, n: *n }),
                (None, Some("+")) => Point::Compact(CompactPoint::End { copy, end: End::Plus }),
                (None, Some("-")) => Point::Compact(CompactPoint::End { copy, end: End::Minus }),
                _ => return Err(doc.err(field, "expected {copy, n} or {copy, end}")),
            }
        }
        (SystemDescriptor::Polytope(_), _) => Point::Vector(doc.to_rationals(field, v)?),
        (SystemDescriptor::Algebraic { .. }, _) => {
            Point::Torus(TorusPoint::new(doc.to_rationals(field, v)?).map_err(doc.core(field))?)
        }
        _ => return Err(doc.err(field, format!("not a point of a {} system", system.kind()))),
    };
    system.validate_point(&p).map_err(doc.core(field))
}

/// Hand-written witness data: action tables, `zeta`, `epsilon`, `scope`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessInput {
    pub action: FiniteAction,
    pub zeta: Vec<Point>,
    pub epsilon: Option<Rational>,
    pub scope: Vec<usize>,
}

pub fn parse_witness_doc(doc: &Doc, system: &SystemDescriptor) -> CliResult<WitnessInput> {
    let tables = doc.usize_rows("generators")?;
    let size = tables.first().map_or(0, Vec::len);
    let action = FiniteAction::new(size, tables).map_err(doc.core("generators"))?;
    let zeta = doc
        .array("zeta", doc.value("zeta")?)?
        .iter()
        .enumerate()
        .map(|(i, v)| parse_point(doc, &format!("zeta[{i}]"), system, v))
        .collect::<CliResult<Vec<_>>>()?;
    let epsilon = doc.opt("epsilon").map(|v| doc.to_rational("epsilon", v)).transpose()?;
    let scope = match doc.opt("scope") {
        Some(_) => doc.usizes("scope")?,
        None => (0..system.rank()).collect(),
    };
    Ok(WitnessInput { action, zeta, epsilon, scope })
}
