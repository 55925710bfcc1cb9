//! Finite abelian point groups: representation checks, invariance of
//! operators, irrep classification of eigenvectors and projection.
//!
//! All irreps are one-dimensional, so a vector `v` belonging to irrep Γ
//! satisfies `U(g) v = χ_Γ(g) v` and the diagonal elements `⟨v|U(g)|v⟩`
//! reproduce the character row of Γ.

use std::fmt;

use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix, SymmetricMatrix};

/// Orthogonality tolerance for representation matrices.
pub const ORTHOGONALITY_TOL: f64 = 1e-12;
/// Tolerance when matching a product against the element list.
pub const CLOSURE_TOL: f64 = 1e-10;
/// Default tolerance when matching measured characters to a table row.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-6;

/// A finite group realized by orthogonal matrices. The first element is the
/// identity.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupRep {
    pub name: String,
    pub elements: Vec<(String, Matrix)>,
}

impl GroupRep {
    pub fn new(name: impl Into<String>, elements: Vec<(String, Matrix)>) -> Self {
        Self {
            name: name.into(),
            elements,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements.first().map_or(0, |(_, m)| m.rows())
    }

    pub fn labels(&self) -> Vec<&str> {
        self.elements.iter().map(|(l, _)| l.as_str()).collect()
    }
}

/// Outcome of [`verify_group`].
#[derive(Clone, Debug, PartialEq)]
pub struct GroupReport {
    /// `|UᵀU - I|_max` per element.
    pub orthogonality_errors: Vec<f64>,
    pub square_and_consistent: bool,
    pub identity_first: bool,
    /// `table[i][j]` is the index of `U_i U_j`, when closure holds.
    pub multiplication_table: Option<Vec<Vec<usize>>>,
    /// Pairs `(i, j)` whose product matched no element.
    pub closure_failures: Vec<(usize, usize)>,
}

impl GroupReport {
    pub fn orthogonal(&self) -> bool {
        self.orthogonality_errors
            .iter()
            .all(|&e| e <= ORTHOGONALITY_TOL)
    }

    pub fn closed(&self) -> bool {
        self.multiplication_table.is_some() && self.closure_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.square_and_consistent && self.orthogonal() && self.identity_first && self.closed()
    }
}

/// Checks orthogonality, closure and that the identity comes first.
pub fn verify_group(rep: &GroupRep) -> GroupReport {
    let dim = rep.dim();
    let square_and_consistent = !rep.elements.is_empty()
        && rep
            .elements
            .iter()
            .all(|(_, m)| m.rows() == dim && m.cols() == dim);
    if !square_and_consistent {
        return GroupReport {
            orthogonality_errors: Vec::new(),
            square_and_consistent,
            identity_first: false,
            multiplication_table: None,
            closure_failures: Vec::new(),
        };
    }

    let identity = Matrix::identity(dim);
    let orthogonality_errors = rep
        .elements
        .iter()
        .map(|(_, u)| {
            u.transpose()
                .matmul(u)
                .expect("square")
                .max_abs_diff(&identity)
        })
        .collect();
    let identity_first = rep.elements[0].1.max_abs_diff(&identity) <= CLOSURE_TOL;

    let mut table = vec![vec![0; rep.order()]; rep.order()];
    let mut closure_failures = Vec::new();
    for (i, (_, a)) in rep.elements.iter().enumerate() {
        for (j, (_, b)) in rep.elements.iter().enumerate() {
            let product = a.matmul(b).expect("square");
            match rep
                .elements
                .iter()
                .position(|(_, c)| c.max_abs_diff(&product) <= CLOSURE_TOL)
            {
                Some(k) => table[i][j] = k,
                None => closure_failures.push((i, j)),
            }
        }
    }

    GroupReport {
        orthogonality_errors,
        square_and_consistent,
        identity_first,
        multiplication_table: closure_failures.is_empty().then_some(table),
        closure_failures,
    }
}

/// `max_g |U(g)ᵀ m U(g) - m|_max`; zero when `m` is invariant under the group.
pub fn commutant_residual(rep: &GroupRep, m: &SymmetricMatrix) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (_, u) in &rep.elements {
        if u.rows() != m.dim() || u.cols() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                found: u.rows(),
            });
        }
        let transformed = u.congruence(m.as_matrix())?;
        worst = worst.max(transformed.max_abs_diff(m.as_matrix()));
    }
    Ok(worst)
}

/// Irrep name with its character row.
#[derive(Clone, Debug, PartialEq)]
pub struct IrrepLabel {
    pub label: String,
    pub characters: Vec<f64>,
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Characters of the one-dimensional irreps of an abelian group.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterTable {
    pub group_name: String,
    pub element_order: Vec<String>,
    pub rows: Vec<IrrepLabel>,
}

impl CharacterTable {
    /// Validates that every character is ±1 and rows are orthonormal under
    /// `(1/|G|) Σ_g χ_a(g) χ_b(g)`.
    pub fn new(
        group_name: impl Into<String>,
        element_order: Vec<String>,
        rows: Vec<IrrepLabel>,
    ) -> Result<Self> {
        let order = element_order.len();
        for row in &rows {
            if row.characters.len() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    found: row.characters.len(),
                });
            }
            if row.characters.iter().any(|&c| c != 1.0 && c != -1.0) {
                return Err(Error::InvalidParameter(format!(
                    "irrep {} has a character other than ±1",
                    row.label
                )));
            }
        }
        for (a, ra) in rows.iter().enumerate() {
            for rb in &rows[a..] {
                let inner = dot(&ra.characters, &rb.characters) / order as f64;
                let expected = if ra.label == rb.label { 1.0 } else { 0.0 };
                if (inner - expected).abs() > 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "irreps {} and {} are not orthogonal",
                        ra.label, rb.label
                    )));
                }
            }
        }
        Ok(Self {
            group_name: group_name.into(),
            element_order,
            rows,
        })
    }

    pub fn irrep(&self, label: &str) -> Option<&IrrepLabel> {
        self.rows.iter().find(|r| r.label == label)
    }

    fn check_compatible(&self, rep: &GroupRep) -> Result<()> {
        let labels = rep.labels();
        if labels.len() != self.element_order.len()
            || labels.iter().zip(&self.element_order).any(|(a, b)| a != b)
        {
            return Err(Error::InvalidParameter(format!(
                "character table element order {:?} does not match representation {:?}",
                self.element_order, labels
            )));
        }
        Ok(())
    }
}

/// The order-4 group `C2v` with elements `(E, C2, σv1, σv2)`.
pub fn c2v_table() -> CharacterTable {
    let order = ["E", "C2", "sv1", "sv2"].map(String::from).to_vec();
    let row = |label: &str, c: [f64; 4]| IrrepLabel {
        label: label.to_string(),
        characters: c.to_vec(),
    };
    CharacterTable::new(
        "C2v",
        order,
        vec![
            row("A1", [1.0, 1.0, 1.0, 1.0]),
            row("A2", [1.0, 1.0, -1.0, -1.0]),
            row("B1", [1.0, -1.0, 1.0, -1.0]),
            row("B2", [1.0, -1.0, -1.0, 1.0]),
        ],
    )
    .expect("C2v table is valid")
}

/// Symmetry label assigned to one state.
#[derive(Clone, Debug, PartialEq)]
pub enum StateSymmetry {
    Irrep(IrrepLabel),
    /// No table row matched; the vector mixes irreps.
    Mixed {
        characters: Vec<f64>,
    },
}

impl StateSymmetry {
    pub fn label(&self) -> Option<&str> {
        match self {
            StateSymmetry::Irrep(l) => Some(&l.label),
            StateSymmetry::Mixed { .. } => None,
        }
    }
}

impl fmt::Display for StateSymmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSymmetry::Irrep(l) => f.write_str(&l.label),
            StateSymmetry::Mixed { .. } => f.write_str("MIXED"),
        }
    }
}

/// `⟨v|U(g)|v⟩` for each group element.
pub fn characters_of(v: &[f64], rep: &GroupRep) -> Result<Vec<f64>> {
    rep.elements
        .iter()
        .map(|(_, u)| Ok(dot(v, &u.matvec(v)?)))
        .collect()
}

/// Matches a unit vector against the character table.
pub fn classify_vector(
    v: &[f64],
    rep: &GroupRep,
    table: &CharacterTable,
    tol: f64,
) -> Result<StateSymmetry> {
    table.check_compatible(rep)?;
    let chars = characters_of(v, rep)?;
    let hit = table.rows.iter().find(|row| {
        row.characters
            .iter()
            .zip(&chars)
            .all(|(a, b)| (a - b).abs() <= tol)
    });
    Ok(match hit {
        Some(row) => StateSymmetry::Irrep(row.clone()),
        None => StateSymmetry::Mixed { characters: chars },
    })
}

/// Labels every eigenvector of `spectrum`, in column order.
///
/// Degenerate clusters must be supplied in a symmetry-adapted basis (for
/// example the HFT-consistent one); arbitrary combinations come back as
/// [`StateSymmetry::Mixed`].
pub fn classify(
    spectrum: &Spectrum,
    rep: &GroupRep,
    table: &CharacterTable,
    tol: f64,
) -> Result<Vec<StateSymmetry>> {
    (0..spectrum.dim())
        .map(|k| classify_vector(&spectrum.vector(k), rep, table, tol))
        .collect()
}

/// Projection `(1/|G|) Σ_g χ(g) U(g) v`; not normalized.
pub fn project(v: &[f64], irrep: &IrrepLabel, rep: &GroupRep) -> Result<Vec<f64>> {
    if irrep.characters.len() != rep.order() {
        return Err(Error::DimensionMismatch {
            expected: rep.order(),
            found: irrep.characters.len(),
        });
    }
    let mut out = vec![0.0; v.len()];
    for ((_, u), &chi) in rep.elements.iter().zip(&irrep.characters) {
        for (o, x) in out.iter_mut().zip(u.matvec(v)?) {
            *o += chi * x;
        }
    }
    let scale = 1.0 / rep.order() as f64;
    out.iter_mut().for_each(|x| *x *= scale);
    Ok(out)
}

/// Projector matrix `(1/|G|) Σ_g χ(g) U(g)`.
pub fn projector(irrep: &IrrepLabel, rep: &GroupRep) -> Result<Matrix> {
    let n = rep.dim();
    let mut p = Matrix::zeros(n, n);
    for ((_, u), &chi) in rep.elements.iter().zip(&irrep.characters) {
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += chi * u[(i, j)];
            }
        }
    }
    Ok(p.scaled(1.0 / rep.order() as f64))
}

/// Reads a representation (and optionally its character table) from text.
///
/// ```text
/// # comment
/// group C2v
/// element E
/// 1 0
/// 0 1
/// element C2
/// ...
/// irrep A1 1 1 1 1
/// ```
///
/// Matrix rows follow their `element` line, one row per line. The character
/// table columns follow the element order.
pub fn parse_symmetry(text: &str) -> Result<(GroupRep, Option<CharacterTable>)> {
    let mut name: Option<String> = None;
    let mut elements: Vec<(String, Vec<Vec<f64>>)> = Vec::new();
    let mut irreps: Vec<IrrepLabel> = Vec::new();
    let mut in_element = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let line_no = lineno + 1;
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or("");
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        match head {
            "group" => {
                name = Some(words.collect::<Vec<_>>().join(" "));
                in_element = false;
            }
            "element" => {
                let label = words
                    .next()
                    .ok_or_else(|| parse_err("element needs a label".into()))?;
                elements.push((label.to_string(), Vec::new()));
                in_element = true;
            }
            "irrep" => {
                let label = words
                    .next()
                    .ok_or_else(|| parse_err("irrep needs a label".into()))?;
                let characters = words
                    .map(|w| w.parse::<f64>().map_err(|e| parse_err(format!("{w}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                irreps.push(IrrepLabel {
                    label: label.to_string(),
                    characters,
                });
                in_element = false;
            }
            _ if in_element => {
                let row = line
                    .split_whitespace()
                    .map(|w| w.parse::<f64>().map_err(|e| parse_err(format!("{w}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                elements.last_mut().expect("in element").1.push(row);
            }
            other => return Err(parse_err(format!("unexpected token '{other}'"))),
        }
    }

    let name = name.ok_or(Error::Parse {
        line: 0,
        message: "missing 'group' line".into(),
    })?;
    if elements.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no elements".into(),
        });
    }
    let elements = elements
        .into_iter()
        .map(|(label, rows)| {
            let m = Matrix::from_rows(&rows)?;
            if !m.is_square() {
                return Err(Error::NotSquare {
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            Ok((label, m))
        })
        .collect::<Result<Vec<_>>>()?;
    let rep = GroupRep::new(name.clone(), elements);
    let table = if irreps.is_empty() {
        None
    } else {
        let order = rep.labels().into_iter().map(String::from).collect();
        Some(CharacterTable::new(name, order, irreps)?)
    };
    Ok((rep, table))
}

/// Inverse of [`parse_symmetry`].
pub fn write_symmetry(rep: &GroupRep, table: Option<&CharacterTable>) -> String {
    let mut out = format!("group {}\n", rep.name);
    for (label, m) in &rep.elements {
        out.push_str(&format!("element {label}\n"));
        for i in 0..m.rows() {
            let row: Vec<String> = m.row(i).iter().map(|x| format!("{x}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    if let Some(t) = table {
        for row in &t.rows {
            let chars: Vec<String> = row.characters.iter().map(|x| format!("{x}")).collect();
            out.push_str(&format!("irrep {} {}\n", row.label, chars.join(" ")));
        }
    }
    out
}
