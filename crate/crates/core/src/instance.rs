//! Problem instances, distance and adjacency matrices, and their text formats.

use std::fmt::Write as _;

use ndarray::Array2;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng;

/// Header line of the native instance format.
pub const INSTANCE_HEADER: &str = "UTSP-INSTANCE v1";

/// A two-dimensional Euclidean TSP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    coords: Vec<(f64, f64)>,
    name: Option<String>,
}

impl Instance {
    pub fn new(coords: Vec<(f64, f64)>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(Error::invalid(format!(
                "an instance needs at least 3 cities, got {}",
                coords.len()
            )));
        }
        if let Some(i) = coords
            .iter()
            .position(|&(x, y)| !x.is_finite() || !y.is_finite())
        {
            return Err(Error::invalid(format!("city {i} has a non-finite coordinate")));
        }
        Ok(Instance { coords, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Draws `n` cities uniformly from the unit square.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!(
                "an instance needs at least 3 cities, got {n}"
            )));
        }
        let mut rng = rng::seeded(seed);
        let coords = (0..n)
            .map(|_| {
                let x: f64 = rng.gen();
                let y: f64 = rng.gen();
                (x, y)
            })
            .collect();
        Ok(Instance {
            coords,
            name: Some(format!("rand{n}-s{seed}")),
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn distance_matrix(&self) -> DistanceMatrix {
        DistanceMatrix::euclidean(self)
    }

    /// Serializes to the native `UTSP-INSTANCE v1` format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{INSTANCE_HEADER}").unwrap();
        writeln!(out, "{}", self.len()).unwrap();
        for &(x, y) in &self.coords {
            writeln!(out, "{x:?} {y:?}").unwrap();
        }
        out
    }

    /// Parses the native `UTSP-INSTANCE v1` format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "empty document"))?;
        if header != INSTANCE_HEADER {
            return Err(Error::parse(ln, format!("expected header `{INSTANCE_HEADER}`")));
        }
        let (ln, count) = lines
            .next()
            .ok_or_else(|| Error::parse(ln + 1, "missing city count"))?;
        let n: usize = count
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad city count `{count}`")))?;
        let mut coords = Vec::with_capacity(n);
        let mut last = ln;
        for (ln, line) in lines {
            last = ln;
            if coords.len() == n {
                return Err(Error::parse(ln, "more coordinate rows than the declared count"));
            }
            let mut fields = line.split_whitespace();
            let x = parse_f64(fields.next(), ln)?;
            let y = parse_f64(fields.next(), ln)?;
            if fields.next().is_some() {
                return Err(Error::parse(ln, "expected exactly two values `x y`"));
            }
            coords.push((x, y));
        }
        if coords.len() != n {
            return Err(Error::parse(
                last,
                format!("declared {n} cities but found {}", coords.len()),
            ));
        }
        Instance::new(coords)
    }

    /// Serializes to a TSPLIB `EUC_2D` document.
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        writeln!(out, "NAME : {}", self.name().unwrap_or("unnamed")).unwrap();
        writeln!(out, "TYPE : TSP").unwrap();
        writeln!(out, "DIMENSION : {}", self.len()).unwrap();
        writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D").unwrap();
        writeln!(out, "NODE_COORD_SECTION").unwrap();
        for (i, &(x, y)) in self.coords.iter().enumerate() {
            writeln!(out, "{} {x:?} {y:?}", i + 1).unwrap();
        }
        writeln!(out, "EOF").unwrap();
        out
    }

    /// Parses the `EUC_2D` subset of TSPLIB. Coordinates are kept as written
    /// and 1-based node ids become 0-based cities.
    pub fn parse_tsplib(text: &str) -> Result<Self> {
        let mut name = None;
        let mut dimension: Option<usize> = None;
        let mut weight_type_seen = false;
        let mut coords: Vec<Option<(f64, f64)>> = Vec::new();
        let mut in_coords = false;
        let mut section_line = None;
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let ln = idx + 1;
            last_line = ln;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if line == "EOF" {
                break;
            }
            if in_coords {
                let mut fields = line.split_whitespace();
                let id_str = fields.next().unwrap_or_default();
                let Ok(id) = id_str.parse::<usize>() else {
                    return Err(Error::parse(
                        ln,
                        format!("expected `id x y` in NODE_COORD_SECTION, got `{line}`"),
                    ));
                };
                let x = parse_f64(fields.next(), ln)?;
                let y = parse_f64(fields.next(), ln)?;
                let n = coords.len();
                if id == 0 || id > n {
                    return Err(Error::parse(
                        ln,
                        format!("node id {id} outside 1..={n} (dimension mismatch)"),
                    ));
                }
                if coords[id - 1].is_some() {
                    return Err(Error::parse(ln, format!("node id {id} listed twice")));
                }
                coords[id - 1] = Some((x, y));
                continue;
            }

            if line.starts_with("NODE_COORD_SECTION") {
                let n = dimension.ok_or_else(|| {
                    Error::parse(ln, "NODE_COORD_SECTION before DIMENSION")
                })?;
                if !weight_type_seen {
                    return Err(Error::parse(ln, "NODE_COORD_SECTION before EDGE_WEIGHT_TYPE"));
                }
                coords = vec![None; n];
                in_coords = true;
                section_line = Some(ln);
                continue;
            }
            if line.ends_with("_SECTION") {
                return Err(Error::parse(ln, format!("unsupported section `{line}`")));
            }

            let (key, value) = line
                .split_once(':')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::parse(ln, format!("expected `KEY : VALUE`, got `{line}`")))?;
            match key {
                "NAME" => name = Some(value.to_string()),
                "TYPE" => {
                    if value != "TSP" {
                        return Err(Error::parse(ln, format!("unsupported problem type `{value}`")));
                    }
                }
                "DIMENSION" => {
                    let n = value
                        .parse()
                        .map_err(|_| Error::parse(ln, format!("bad dimension `{value}`")))?;
                    dimension = Some(n);
                }
                "EDGE_WEIGHT_TYPE" => {
                    if value != "EUC_2D" {
                        return Err(Error::parse(
                            ln,
                            format!("unsupported edge weight type `{value}` (only EUC_2D)"),
                        ));
                    }
                    weight_type_seen = true;
                }
                _ => {}
            }
        }

        let Some(section_line) = section_line else {
            return Err(Error::parse(last_line, "missing NODE_COORD_SECTION"));
        };
        let listed = coords.iter().filter(|c| c.is_some()).count();
        if listed != coords.len() {
            return Err(Error::parse(
                last_line.max(section_line),
                format!("DIMENSION is {} but {listed} coordinate rows were given", coords.len()),
            ));
        }
        let coords = coords.into_iter().map(Option::unwrap).collect();
        let mut inst = Instance::new(coords)?;
        inst.name = name;
        Ok(inst)
    }
}

fn parse_f64(field: Option<&str>, ln: usize) -> Result<f64> {
    let s = field.ok_or_else(|| Error::parse(ln, "missing coordinate"))?;
    s.parse()
        .map_err(|_| Error::parse(ln, format!("bad number `{s}`")))
}

/// Symmetric matrix of pairwise city distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    d: Array2<f64>,
}

impl DistanceMatrix {
    /// Exact Euclidean distances. Each unordered pair is computed once and
    /// mirrored, so the matrix is bitwise symmetric.
    pub fn euclidean(inst: &Instance) -> Self {
        Self::build(inst, |dx, dy| (dx * dx + dy * dy).sqrt())
    }

    /// TSPLIB `nint` rounding of Euclidean distances, for comparing against
    /// published integer tour lengths.
    pub fn tsplib_rounded(inst: &Instance) -> Self {
        Self::build(inst, |dx, dy| ((dx * dx + dy * dy).sqrt() + 0.5).floor())
    }

    fn build(inst: &Instance, metric: impl Fn(f64, f64) -> f64) -> Self {
        let n = inst.len();
        let c = inst.coords();
        let mut d = Array2::zeros((n, n));
        for i in 0..n {
            for j in i + 1..n {
                let v = metric(c[i].0 - c[j].0, c[i].1 - c[j].1);
                d[[i, j]] = v;
                d[[j, i]] = v;
            }
        }
        DistanceMatrix { d }
    }

    /// Wraps an explicit matrix after checking it is square, symmetric,
    /// non-negative and zero on the diagonal.
    pub fn from_matrix(d: Array2<f64>) -> Result<Self> {
        let (r, c) = d.dim();
        if r != c || r < 3 {
            return Err(Error::invalid(format!("distance matrix must be square with n >= 3, got {r}x{c}")));
        }
        for i in 0..r {
            if d[[i, i]] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..r {
                let v = d[[i, j]];
                if !v.is_finite() || v < 0.0 || v != d[[j, i]] {
                    return Err(Error::invalid(format!("bad distance at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceMatrix { d })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[[i, j]]
    }

    pub fn len(&self) -> usize {
        self.d.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.d
    }
}

/// Gaussian-kernel adjacency `w = exp(-d / tau)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyWeights {
    w: Array2<f64>,
    tau: f64,
}

/// Temperature used for unit-square instances unless configured otherwise.
pub const DEFAULT_TAU: f64 = 0.1;

impl AdjacencyWeights {
    pub fn new(dist: &DistanceMatrix, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::invalid(format!("temperature must be positive, got {tau}")));
        }
        let w = dist.matrix().mapv(|d| (-d / tau).exp());
        Ok(AdjacencyWeights { w, tau })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.w[[i, j]]
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.w
    }
}
