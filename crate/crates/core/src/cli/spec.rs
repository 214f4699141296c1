//! Line-oriented system description files.
//!
//! ```text
//! # comment
//! name fibonacci
//! field x^2-x-1
//! frame
//!   (1,0)
//! end
//! substitution
//!   colors 2
//!   expansion
//!     (0,1)
//!   end
//!   digits 0 0 = [0,0]
//!   digits 0 1 = [0,0]
//!   digits 1 0 = [0,1]
//! end
//! param window -50,50
//! ```
//!
//! Field elements are power-basis coordinate tuples `(a,b,..)` with entries `p` or `p/q`; a bare
//! rational stands for its constant element. Module points are integer tuples `[a,b,..]`.
//! Other blocks: `scheme` (with `lattice`, `physical`, `internal` sub-blocks and a `window` line),
//! `cluster` (lines `<color> [..]`), and the single lines `beta` and `salem <radius>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebraic::AlgebraicInteger;
use crate::cutproject::{generate_model_set, salem_scheme, CutProjectScheme, Window};
use crate::delone::{MSet, ModuleFrame, Point};
use crate::error::{Error, Result};
use crate::field::{Elem, NumberField};
use crate::geometry::Region;
use crate::matrix::FieldMatrix;
use crate::onedim::{beta_integers, BetaSystem};
use crate::poly::IntPolynomial;
use crate::substitution::{
    find_generating_cluster, find_two_sided_cluster, generate_patch, GeneratingCluster, MSetSubstitution,
};

/// Power-basis coordinates of a field element.
pub type Coords = Vec<BigRational>;

#[derive(Clone, Debug, PartialEq)]
pub struct SubstSpec {
    pub colors: usize,
    pub expansion: Vec<Vec<Coords>>,
    /// digits[i][j], each canonically sorted.
    pub digits: Vec<Vec<Vec<Point>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeSpec {
    pub lattice: Vec<Vec<Coords>>,
    pub physical: Vec<Vec<Coords>>,
    pub internal: Vec<Vec<f64>>,
    pub window: Window,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    pub name: Option<String>,
    pub field: IntPolynomial,
    pub frame: Option<Vec<Vec<Coords>>>,
    pub substitution: Option<SubstSpec>,
    pub scheme: Option<SchemeSpec>,
    pub cluster: Option<Vec<(usize, Point)>>,
    pub beta: bool,
    pub salem: Option<f64>,
    pub params: BTreeMap<String, String>,
}

impl Default for SystemSpec {
    fn default() -> Self {
        Self {
            name: None,
            field: IntPolynomial::x(),
            frame: None,
            substitution: None,
            scheme: None,
            cluster: None,
            beta: false,
            salem: None,
            params: BTreeMap::new(),
        }
    }
}

struct Line<'a> {
    no: usize,
    indent: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err(&self, col: usize, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.no, col: self.indent + col + 1, msg: msg.into() }
    }

    /// Whitespace-separated tokens with their columns; brackets group.
    fn tokens(&self) -> Result<Vec<(usize, &str)>> {
        let mut out = Vec::new();
        let b = self.text.as_bytes();
        let mut i = 0;
        while i < b.len() {
            if b[i].is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let mut depth = 0i32;
            while i < b.len() && (depth > 0 || !b[i].is_ascii_whitespace()) {
                match b[i] {
                    b'(' | b'[' => depth += 1,
                    b')' | b']' => depth -= 1,
                    _ => {}
                }
                if depth < 0 {
                    return Err(self.err(i, "unbalanced bracket"));
                }
                i += 1;
            }
            if depth != 0 {
                return Err(self.err(start, "unclosed bracket"));
            }
            out.push((start, &self.text[start..i]));
        }
        Ok(out)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            let p: BigInt = p.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.trim().parse().ok()?)),
    }
}

fn parse_coords(line: &Line, col: usize, tok: &str, degree: usize) -> Result<Coords> {
    let mut c: Coords = if let Some(inner) = tok.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        inner
            .split(',')
            .map(|e| parse_rational(e).ok_or_else(|| line.err(col, format!("bad rational '{e}'"))))
            .collect::<Result<_>>()?
    } else {
        vec![parse_rational(tok).ok_or_else(|| line.err(col, format!("bad field element '{tok}'")))?]
    };
    if c.len() > degree {
        return Err(line.err(col, format!("element has more than {degree} coordinates")));
    }
    c.resize(degree, BigRational::zero());
    Ok(c)
}

fn parse_point(line: &Line, col: usize, tok: &str) -> Result<Point> {
    let inner = tok
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| line.err(col, format!("expected [..] point, got '{tok}'")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|e| e.trim().parse::<i64>().map_err(|_| line.err(col, format!("bad integer '{e}'")))).collect()
}

fn parse_f64(line: &Line, col: usize, tok: &str) -> Result<f64> {
    tok.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| line.err(col, format!("bad number '{tok}'")))
}

fn parse_usize(line: &Line, col: usize, tok: &str) -> Result<usize> {
    tok.parse().map_err(|_| line.err(col, format!("bad index '{tok}'")))
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
    last_line: usize,
}

impl<'a> Parser<'a> {
    fn next(&mut self) -> Option<&Line<'a>> {
        let l = self.lines.get(self.pos);
        self.pos += 1;
        l
    }

    fn eof(&self, what: &str) -> Error {
        Error::Parse { line: self.last_line + 1, col: 1, msg: format!("unexpected end of file in {what}") }
    }

    /// Rows of a matrix block up to its `end`.
    fn matrix<T>(&mut self, what: &str, mut cell: impl FnMut(&Line, usize, &str) -> Result<T>) -> Result<Vec<Vec<T>>> {
        let mut rows = Vec::new();
        loop {
            let line = self.lines.get(self.pos).ok_or_else(|| self.eof(what))?;
            self.pos += 1;
            let toks = line.tokens()?;
            if toks.len() == 1 && toks[0].1 == "end" {
                break;
            }
            let row = toks.iter().map(|&(c, t)| cell(line, c, t)).collect::<Result<Vec<T>>>()?;
            if let Some(first) = rows.first().map(Vec::len) {
                if row.len() != first {
                    return Err(line.err(0, format!("row has {} entries, expected {first}", row.len())));
                }
            }
            rows.push(row);
        }
        Ok(rows)
    }
}

impl SystemSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<Line> = text
            .lines()
            .enumerate()
            .filter_map(|(i, raw)| {
                let body = raw.split('#').next().unwrap_or("");
                let trimmed = body.trim_start();
                let t = trimmed.trim_end();
                (!t.is_empty()).then(|| Line { no: i + 1, indent: body.len() - trimmed.len(), text: t })
            })
            .collect();
        let last_line = text.lines().count();
        let mut p = Parser { lines, pos: 0, last_line };
        let mut spec = SystemSpec::default();
        let mut degree = 1;
        while let Some(line) = p.next() {
            let toks = line.tokens()?;
            let (c0, kw) = toks[0];
            let line_no = line.no;
            let expect = |n: usize| -> Result<()> {
                if toks.len() != n {
                    Err(Error::Parse { line: line_no, col: 1, msg: format!("'{kw}' takes {} argument(s)", n - 1) })
                } else {
                    Ok(())
                }
            };
            match kw {
                "name" => {
                    expect(2)?;
                    spec.name = Some(toks[1].1.to_string());
                }
                "field" => {
                    let rest = &line.text[toks[1.min(toks.len() - 1)].0..];
                    if toks.len() < 2 {
                        return Err(line.err(c0, "field needs a polynomial"));
                    }
                    let poly = IntPolynomial::parse(rest).map_err(|e| match e {
                        Error::Parse { col, msg, .. } => line.err(toks[1].0 + col - 1, msg),
                        other => other,
                    })?;
                    if !poly.is_monic() || poly.degree().unwrap_or(0) == 0 {
                        return Err(line.err(toks[1].0, "field polynomial must be monic of degree >= 1"));
                    }
                    degree = poly.degree().unwrap_or(1);
                    spec.field = poly;
                }
                "frame" => {
                    expect(1)?;
                    spec.frame = Some(p.matrix("frame", |l, c, t| parse_coords(l, c, t, degree))?);
                }
                "beta" => {
                    expect(1)?;
                    spec.beta = true;
                }
                "salem" => {
                    expect(2)?;
                    spec.salem = Some(parse_f64(line, toks[1].0, toks[1].1)?);
                }
                "param" => {
                    if toks.len() != 3 {
                        return Err(line.err(c0, "param takes a key and a value"));
                    }
                    spec.params.insert(toks[1].1.to_string(), toks[2].1.to_string());
                }
                "cluster" => {
                    expect(1)?;
                    let mut pts = Vec::new();
                    loop {
                        let l = p.lines.get(p.pos).ok_or_else(|| p.eof("cluster"))?;
                        p.pos += 1;
                        let t = l.tokens()?;
                        if t.len() == 1 && t[0].1 == "end" {
                            break;
                        }
                        if t.len() != 2 {
                            return Err(l.err(0, "cluster lines are '<color> [..]'"));
                        }
                        pts.push((parse_usize(l, t[0].0, t[0].1)?, parse_point(l, t[1].0, t[1].1)?));
                    }
                    pts.sort();
                    spec.cluster = Some(pts);
                }
                "substitution" => {
                    expect(1)?;
                    spec.substitution = Some(parse_substitution(&mut p, degree)?);
                }
                "scheme" => {
                    expect(1)?;
                    spec.scheme = Some(parse_scheme(&mut p, degree)?);
                }
                other => return Err(line.err(c0, format!("unknown keyword '{other}'"))),
            }
        }
        Ok(spec)
    }

    /// Canonical text; `parse(serialize(s)) == s`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        if let Some(n) = &self.name {
            let _ = writeln!(s, "name {n}");
        }
        let _ = writeln!(s, "field {}", poly_text(&self.field));
        if let Some(f) = &self.frame {
            s.push_str("frame\n");
            write_coord_rows(&mut s, "  ", f);
            s.push_str("end\n");
        }
        if let Some(sub) = &self.substitution {
            let _ = writeln!(s, "substitution\n  colors {}\n  expansion", sub.colors);
            write_coord_rows(&mut s, "    ", &sub.expansion);
            s.push_str("  end\n");
            for (i, row) in sub.digits.iter().enumerate() {
                for (j, set) in row.iter().enumerate() {
                    if !set.is_empty() {
                        let pts: Vec<String> = set.iter().map(|p| point_text(p)).collect();
                        let _ = writeln!(s, "  digits {i} {j} = {}", pts.join(" "));
                    }
                }
            }
            s.push_str("end\n");
        }
        if let Some(sc) = &self.scheme {
            s.push_str("scheme\n  lattice\n");
            write_coord_rows(&mut s, "    ", &sc.lattice);
            s.push_str("  end\n  physical\n");
            write_coord_rows(&mut s, "    ", &sc.physical);
            s.push_str("  end\n  internal\n");
            for row in &sc.internal {
                let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
                let _ = writeln!(s, "    {}", cells.join(" "));
            }
            s.push_str("  end\n");
            let _ = writeln!(s, "  window {}", window_text(&sc.window));
            s.push_str("end\n");
        }
        if let Some(c) = &self.cluster {
            s.push_str("cluster\n");
            for (i, p) in c {
                let _ = writeln!(s, "  {i} {}", point_text(p));
            }
            s.push_str("end\n");
        }
        if self.beta {
            s.push_str("beta\n");
        }
        if let Some(r) = self.salem {
            let _ = writeln!(s, "salem {r:?}");
        }
        for (k, v) in &self.params {
            let _ = writeln!(s, "param {k} {v}");
        }
        s
    }

    pub fn number_field(&self) -> Result<Arc<NumberField>> {
        if self.field.degree() == Some(1) && self.field.coeff(0).is_zero() {
            return Ok(Arc::new(NumberField::rationals()));
        }
        Ok(Arc::new(NumberField::from_poly(self.field.clone())?))
    }

    /// The declared frame, else the power basis (degree > 1) or the standard lattice of the
    /// substitution's dimension.
    pub fn module_frame(&self, field: &Arc<NumberField>) -> Result<Arc<ModuleFrame>> {
        if let Some(rows) = &self.frame {
            return Ok(Arc::new(ModuleFrame::new(field.clone(), to_field_matrix(field, rows)?)?));
        }
        if field.degree() > 1 {
            return Ok(ModuleFrame::power_basis(field.clone()));
        }
        let d = self.substitution.as_ref().map_or(1, |s| s.expansion.len());
        let v = (0..d).map(|i| (0..d).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
        Ok(Arc::new(ModuleFrame::new(field.clone(), v)?))
    }

    pub fn build_substitution(&self) -> Result<MSetSubstitution> {
        let sub = self.substitution.as_ref().ok_or_else(|| Error::Precondition("no substitution block".into()))?;
        let field = self.number_field()?;
        let frame = self.module_frame(&field)?;
        MSetSubstitution::new(frame, to_field_matrix(&field, &sub.expansion)?, sub.digits.clone())
    }

    pub fn build_scheme(&self) -> Result<CutProjectScheme> {
        let sc = self.scheme.as_ref().ok_or_else(|| Error::Precondition("no scheme block".into()))?;
        let field = self.number_field()?;
        CutProjectScheme::new(
            field.clone(),
            to_field_matrix(&field, &sc.lattice)?,
            to_field_matrix(&field, &sc.physical)?,
            sc.internal.clone(),
            sc.window.clone(),
        )
    }

    pub fn build_cluster(&self, frame: &Arc<ModuleFrame>, colors: usize) -> Result<Option<MSet>> {
        let Some(c) = &self.cluster else { return Ok(None) };
        let mut per = vec![Vec::new(); colors];
        for (i, p) in c {
            per.get_mut(*i).ok_or_else(|| Error::Dimension(format!("cluster color {i} out of range")))?.push(p.clone());
        }
        Ok(Some(MSet::new(frame.clone(), per)?))
    }
}

impl SystemSpec {
    /// Dimension of the physical space.
    pub fn dimension(&self) -> usize {
        if let Some(sub) = &self.substitution {
            sub.expansion.len()
        } else if let Some(sc) = &self.scheme {
            sc.physical.len()
        } else {
            1
        }
    }

    /// The spec's cluster (with `param period`), else a two-sided generating cluster, else any.
    pub fn generating_seed(&self, phi: &MSetSubstitution) -> Result<GeneratingCluster> {
        if let Some(c) = self.build_cluster(phi.frame(), phi.colors())? {
            let period = self.params.get("period").and_then(|p| p.parse().ok()).unwrap_or(1);
            return GeneratingCluster::new(phi, c, period);
        }
        find_two_sided_cluster(phi).or_else(|_| find_generating_cluster(phi))
    }

    /// The described point set on `region`: a substitution patch, model set, Salem model set or
    /// β-integers, in that order of precedence.
    pub fn point_set(&self, region: &Region) -> Result<(MSet, Option<MSetSubstitution>)> {
        if self.substitution.is_some() {
            let phi = self.build_substitution()?;
            let g = self.generating_seed(&phi)?;
            let x = generate_patch(&phi, &g, region)?.restrict(region);
            return Ok((x, Some(phi)));
        }
        if self.scheme.is_some() {
            let scheme = self.build_scheme()?;
            let ms = generate_model_set(&scheme, region)?;
            return Ok((ms.to_mset(&scheme)?, None));
        }
        if let Some(r) = self.salem {
            let scheme = salem_scheme(&self.field, r)?;
            let ms = generate_model_set(&scheme, region)?;
            return Ok((ms.to_mset(&scheme)?, None));
        }
        if self.beta {
            let mut sys = BetaSystem::new(AlgebraicInteger::largest_real(self.field.clone())?)?;
            let bound = region.lo[0].abs().max(region.hi[0].abs());
            return Ok((beta_integers(&mut sys, bound)?.restrict(region), None));
        }
        Err(Error::Precondition("spec describes no point set".into()))
    }
}

pub fn to_elem(field: &NumberField, c: &Coords) -> Result<Elem> {
    field.from_rationals(c.clone())
}

fn to_field_matrix(field: &NumberField, rows: &[Vec<Coords>]) -> Result<FieldMatrix> {
    rows.iter().map(|r| r.iter().map(|c| to_elem(field, c)).collect()).collect()
}

fn parse_substitution(p: &mut Parser, degree: usize) -> Result<SubstSpec> {
    let mut colors = None;
    let mut expansion = None;
    let mut entries: Vec<(usize, usize, Vec<Point>, usize, usize)> = Vec::new();
    loop {
        let line = p.lines.get(p.pos).ok_or_else(|| p.eof("substitution"))?;
        p.pos += 1;
        let toks = line.tokens()?;
        match toks[0].1 {
            "end" => break,
            "colors" if toks.len() == 2 => colors = Some(parse_usize(line, toks[1].0, toks[1].1)?),
            "expansion" if toks.len() == 1 => {
                expansion = Some(p.matrix("expansion", |l, c, t| parse_coords(l, c, t, degree))?);
            }
            "digits" if toks.len() >= 4 && toks[3].1 == "=" => {
                let i = parse_usize(line, toks[1].0, toks[1].1)?;
                let j = parse_usize(line, toks[2].0, toks[2].1)?;
                let pts = toks[4..].iter().map(|&(c, t)| parse_point(line, c, t)).collect::<Result<Vec<_>>>()?;
                entries.push((i, j, pts, line.no, line.indent + toks[1].0 + 1));
            }
            other => return Err(line.err(toks[0].0, format!("unexpected '{other}' in substitution"))),
        }
    }
    let err = |msg: &str| Error::Parse { line: p.last_line, col: 1, msg: msg.into() };
    let colors = colors.ok_or_else(|| err("substitution needs 'colors'"))?;
    let expansion = expansion.ok_or_else(|| err("substitution needs an 'expansion' block"))?;
    if expansion.len() != expansion.first().map_or(0, Vec::len) {
        return Err(err("expansion must be square"));
    }
    let mut digits = vec![vec![Vec::new(); colors]; colors];
    for (i, j, pts, line, col) in entries {
        if i >= colors || j >= colors {
            return Err(Error::Parse { line, col, msg: format!("digit index ({i},{j}) out of range") });
        }
        digits[i][j].extend(pts);
    }
    for d in digits.iter_mut().flatten() {
        d.sort();
    }
    Ok(SubstSpec { colors, expansion, digits })
}

fn parse_scheme(p: &mut Parser, degree: usize) -> Result<SchemeSpec> {
    let (mut lattice, mut physical, mut internal, mut window) = (None, None, None, None);
    loop {
        let line = p.lines.get(p.pos).ok_or_else(|| p.eof("scheme"))?;
        p.pos += 1;
        let toks = line.tokens()?;
        match toks[0].1 {
            "end" => break,
            "lattice" => lattice = Some(p.matrix("lattice", |l, c, t| parse_coords(l, c, t, degree))?),
            "physical" => physical = Some(p.matrix("physical", |l, c, t| parse_coords(l, c, t, degree))?),
            "internal" => internal = Some(p.matrix("internal", parse_f64)?),
            "window" => window = Some(parse_window(line, &toks)?),
            other => return Err(line.err(toks[0].0, format!("unexpected '{other}' in scheme"))),
        }
    }
    let err = |msg: &str| Error::Parse { line: p.last_line, col: 1, msg: msg.into() };
    Ok(SchemeSpec {
        lattice: lattice.ok_or_else(|| err("scheme needs a 'lattice' block"))?,
        physical: physical.ok_or_else(|| err("scheme needs a 'physical' block"))?,
        internal: internal.unwrap_or_default(),
        window: window.ok_or_else(|| err("scheme needs a 'window' line"))?,
    })
}

/// `window box <lo..> / <hi..>`, `window ball <r> / <center..>`,
/// `window product <r> / <center..> / <group> ; <group> ..`.
fn parse_window(line: &Line, toks: &[(usize, &str)]) -> Result<Window> {
    if toks.len() < 2 {
        return Err(line.err(toks[0].0, "window needs a kind"));
    }
    let parts: Vec<Vec<(usize, &str)>> = toks[2..].split(|t| t.1 == "/").map(|s| s.to_vec()).collect();
    let nums =
        |part: &[(usize, &str)]| -> Result<Vec<f64>> { part.iter().map(|&(c, t)| parse_f64(line, c, t)).collect() };
    let single = |part: &[(usize, &str)]| -> Result<f64> {
        match part {
            [(c, t)] => parse_f64(line, *c, t),
            _ => Err(line.err(toks[1].0, "expected a single radius")),
        }
    };
    match (toks[1].1, parts.len()) {
        ("box", 2) => Ok(Window::Box { lo: nums(&parts[0])?, hi: nums(&parts[1])? }),
        ("ball", 2) => Ok(Window::Ball { radius: single(&parts[0])?, center: nums(&parts[1])? }),
        ("product", 3) => {
            let groups = parts[2]
                .split(|t| t.1 == ";")
                .map(|g| g.iter().map(|&(c, t)| parse_usize(line, c, t)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(Window::Product { radius: single(&parts[0])?, center: nums(&parts[1])?, groups })
        }
        (kind, _) => Err(line.err(toks[1].0, format!("malformed '{kind}' window"))),
    }
}

fn window_text(w: &Window) -> String {
    let nums = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
    match w {
        Window::Box { lo, hi } => format!("box {} / {}", nums(lo), nums(hi)),
        Window::Ball { center, radius } => format!("ball {radius:?} / {}", nums(center)),
        Window::Product { center, groups, radius } => {
            let g: Vec<String> =
                groups.iter().map(|g| g.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")).collect();
            format!("product {radius:?} / {} / {}", nums(center), g.join(" ; "))
        }
    }
}

fn rational_text(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn coords_text(c: &Coords) -> String {
    format!("({})", c.iter().map(rational_text).collect::<Vec<_>>().join(","))
}

pub fn point_text(p: &[i64]) -> String {
    format!("[{}]", p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
}

fn write_coord_rows(s: &mut String, indent: &str, rows: &[Vec<Coords>]) {
    for row in rows {
        let cells: Vec<String> = row.iter().map(coords_text).collect();
        let _ = writeln!(s, "{indent}{}", cells.join(" "));
    }
}

/// Polynomial text accepted by the polynomial parser.
pub fn poly_text(p: &IntPolynomial) -> String {
    let mut s = String::new();
    for k in (0..p.coeffs().len()).rev() {
        let c = p.coeff(k);
        if c.is_zero() {
            continue;
        }
        let neg = c < BigInt::zero();
        let mag = if neg { -c.clone() } else { c.clone() };
        if neg {
            s.push('-');
        } else if !s.is_empty() {
            s.push('+');
        }
        let unit = mag.is_one();
        match k {
            0 => s.push_str(&mag.to_string()),
            _ => {
                if !unit {
                    s.push_str(&mag.to_string());
                }
                s.push('x');
                if k > 1 {
                    let _ = write!(s, "^{k}");
                }
            }
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIB: &str = "name fibonacci
field x^2-x-1
substitution
  colors 2
  expansion
    (0,1)
  end
  digits 0 0 = [0,0]
  digits 0 1 = [0,0]
  digits 1 0 = [0,1]
end
param window -50,50
";

    #[test]
    fn round_trip() {
        let s = SystemSpec::parse(FIB).unwrap();
        assert_eq!(SystemSpec::parse(&s.serialize()).unwrap(), s);
        assert_eq!(s.serialize(), FIB);
        let phi = s.build_substitution().unwrap();
        assert_eq!(phi.substitution_matrix(), vec![vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn scheme_round_trip() {
        let text = "field x^2-x-1
scheme
  lattice
    1 0
    0 1
  end
  physical
    1 (0,1)
  end
  internal
    1 -0.6180339887498949
  end
  window box -1 / 0.6180339887498949
end
cluster
  0 [0,0]
end
";
        let s = SystemSpec::parse(text).unwrap();
        assert_eq!(SystemSpec::parse(&s.serialize()).unwrap(), s);
        s.build_scheme().unwrap();
    }

    #[test]
    fn errors_carry_position() {
        match SystemSpec::parse("field x^2-x-1\nfrobnicate\n") {
            Err(Error::Parse { line: 2, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match SystemSpec::parse("field x^2-x-1\nframe\n  (1,0) (1/0,1)\nend\n") {
            Err(Error::Parse { line: 3, col: 9, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(SystemSpec::parse("substitution\n colors 1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn poly_text_parses_back() {
        for t in ["x^4-x^3-x^2-x+1", "x-2", "x^2-2x", "3x^3+x"] {
            let p = IntPolynomial::parse(t).unwrap();
            assert_eq!(poly_text(&p), t);
        }
    }
}
