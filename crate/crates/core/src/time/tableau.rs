use std::path::Path;

use thiserror::Error;

/// Butcher tableau pair for an additive (implicit-explicit) Runge-Kutta
/// scheme. Both parts share the weights `b` and abscissae `c`; the
/// explicit part is strictly lower triangular, the implicit part is lower
/// triangular with a zero first stage (ESDIRK form). Row `i` of each
/// matrix stores entries `a[i][0..=i]`.
///
/// An all-zero implicit part describes a plain explicit scheme; the
/// stepper then integrates the whole tangent explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct ArkTableau {
    pub name: String,
    pub order: usize,
    pub a_explicit: Vec<Vec<f64>>,
    pub a_implicit: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TableauError {
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("unparsable number `{0}`")]
    BadNumber(String),
    #[error("unexpected line `{0}`")]
    UnexpectedLine(String),
    #[error("{section} row {row} has {got} entries, expected {want}")]
    RowLength {
        section: String,
        row: usize,
        got: usize,
        want: usize,
    },
    #[error("stage {stage} of the {part} part sums to {got}, but c[{stage}] = {want}")]
    RowSum {
        part: &'static str,
        stage: usize,
        got: f64,
        want: f64,
    },
    #[error("order condition {name} = {got}, expected {want}")]
    OrderCondition {
        name: String,
        got: f64,
        want: f64,
    },
    #[error("explicit part has a nonzero diagonal entry at stage {0}")]
    ExplicitDiagonal(usize),
    #[error("first stage must be explicit in both parts")]
    FirstStage,
    #[error("reading tableau file: {0}")]
    Io(String),
}

const CONDITION_TOL: f64 = 1e-11;

impl ArkTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// True when the implicit part is not identically zero.
    pub fn is_implicit(&self) -> bool {
        self.a_implicit
            .iter()
            .any(|row| row.iter().any(|&a| a != 0.0))
    }

    /// Kennedy-Carpenter ARK4(3)6L[2]SA: six stages, order four, L-stable
    /// ESDIRK implicit part with diagonal 1/4.
    pub fn ark436() -> Self {
        Self::parse(include_str!("tableaux/ark436.tbl")).expect("builtin tableau")
    }

    /// Kennedy-Carpenter ARK5(4)8L[2]SA: eight stages, order five,
    /// L-stable ESDIRK implicit part with diagonal 41/200.
    pub fn ark548() -> Self {
        Self::parse(include_str!("tableaux/ark548.tbl")).expect("builtin tableau")
    }

    /// Classical explicit fourth-order Runge-Kutta scheme.
    pub fn rk4() -> Self {
        Self::parse(include_str!("tableaux/rk4.tbl")).expect("builtin tableau")
    }

    /// Looks up a built-in scheme by its short identifier.
    pub fn builtin(key: &str) -> Option<Self> {
        match key {
            "ark436" => Some(Self::ark436()),
            "ark548" => Some(Self::ark548()),
            "rk4" => Some(Self::rk4()),
            _ => None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self, TableauError> {
        let text = std::fs::read_to_string(path).map_err(|e| TableauError::Io(e.to_string()))?;
        Self::parse(&text)
    }

    /// Parses the plain-text tableau format and validates the result.
    ///
    /// ```text
    /// name RK4
    /// order 4
    /// c 0 1/2 1/2 1
    /// b 1/6 1/3 1/3 1/6
    /// a_explicit
    /// 0
    /// 1/2 0
    /// ...
    /// a_implicit
    /// ...
    /// ```
    ///
    /// Entries are decimal numbers or integer fractions `p/q`; `#` starts
    /// a comment.
    pub fn parse(text: &str) -> Result<Self, TableauError> {
        let mut name = None;
        let mut order = None;
        let mut b = None;
        let mut c: Option<Vec<f64>> = None;
        let mut a_explicit: Option<Vec<Vec<f64>>> = None;
        let mut a_implicit: Option<Vec<Vec<f64>>> = None;
        let mut section: Option<(&'static str, Vec<Vec<f64>>)> = None;

        let close_section =
            |section: Option<(&'static str, Vec<Vec<f64>>)>,
             a_explicit: &mut Option<Vec<Vec<f64>>>,
             a_implicit: &mut Option<Vec<Vec<f64>>>| {
                if let Some((which, rows)) = section {
                    if which == "a_explicit" {
                        *a_explicit = Some(rows);
                    } else {
                        *a_implicit = Some(rows);
                    }
                }
            };

        for raw in text.lines() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == "a_explicit" || line == "a_implicit" {
                close_section(section.take(), &mut a_explicit, &mut a_implicit);
                section = Some((
                    if line == "a_explicit" {
                        "a_explicit"
                    } else {
                        "a_implicit"
                    },
                    Vec::new(),
                ));
                continue;
            }
            if let Some((_, rows)) = section.as_mut() {
                rows.push(parse_row(line)?);
                continue;
            }
            let (key, rest) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| TableauError::UnexpectedLine(line.to_string()))?;
            match key {
                "name" => name = Some(rest.trim().to_string()),
                "order" => {
                    order = Some(
                        rest.trim()
                            .parse::<usize>()
                            .map_err(|_| TableauError::BadNumber(rest.trim().to_string()))?,
                    )
                }
                "b" => b = Some(parse_row(rest)?),
                "c" => c = Some(parse_row(rest)?),
                _ => return Err(TableauError::UnexpectedLine(line.to_string())),
            }
        }
        close_section(section.take(), &mut a_explicit, &mut a_implicit);

        let tableau = ArkTableau {
            name: name.ok_or(TableauError::MissingField("name"))?,
            order: order.ok_or(TableauError::MissingField("order"))?,
            a_explicit: a_explicit.ok_or(TableauError::MissingField("a_explicit"))?,
            a_implicit: a_implicit.ok_or(TableauError::MissingField("a_implicit"))?,
            b: b.ok_or(TableauError::MissingField("b"))?,
            c: c.ok_or(TableauError::MissingField("c"))?,
        };
        tableau.validate()?;
        Ok(tableau)
    }

    /// Structural checks plus the order conditions through order four
    /// (including the coupling conditions between the two parts).
    pub fn validate(&self) -> Result<(), TableauError> {
        let s = self.stages();
        if s == 0 || self.c.len() != s {
            return Err(TableauError::RowLength {
                section: "c".into(),
                row: 0,
                got: self.c.len(),
                want: s,
            });
        }
        for (section, a) in [
            ("a_explicit", &self.a_explicit),
            ("a_implicit", &self.a_implicit),
        ] {
            if a.len() != s {
                return Err(TableauError::RowLength {
                    section: section.into(),
                    row: a.len(),
                    got: a.len(),
                    want: s,
                });
            }
            for (i, row) in a.iter().enumerate() {
                if row.len() != i + 1 {
                    return Err(TableauError::RowLength {
                        section: section.into(),
                        row: i,
                        got: row.len(),
                        want: i + 1,
                    });
                }
            }
        }
        for (i, row) in self.a_explicit.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(TableauError::ExplicitDiagonal(i));
            }
        }
        if self.c[0] != 0.0 || self.a_implicit[0][0] != 0.0 {
            return Err(TableauError::FirstStage);
        }

        let implicit = self.is_implicit();
        for (part, a, used) in [
            ("explicit", &self.a_explicit, true),
            ("implicit", &self.a_implicit, implicit),
        ] {
            if !used {
                continue;
            }
            for (i, row) in a.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                if (sum - self.c[i]).abs() > CONDITION_TOL {
                    return Err(TableauError::RowSum {
                        part,
                        stage: i,
                        got: sum,
                        want: self.c[i],
                    });
                }
            }
        }

        let parts: Vec<(&str, &Vec<Vec<f64>>)> = if implicit {
            vec![("E", &self.a_explicit), ("I", &self.a_implicit)]
        } else {
            vec![("E", &self.a_explicit)]
        };
        let dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).map(|(a, b)| a * b).sum() };
        let mat_vec = |a: &Vec<Vec<f64>>, v: &[f64]| -> Vec<f64> {
            a.iter().map(|row| dot(row, &v[..row.len()])).collect()
        };
        let check = |name: String, got: f64, want: f64| -> Result<(), TableauError> {
            if (got - want).abs() > CONDITION_TOL {
                Err(TableauError::OrderCondition { name, got, want })
            } else {
                Ok(())
            }
        };

        check("sum(b)".into(), self.b.iter().sum(), 1.0)?;
        if self.order >= 2 {
            check("b.c".into(), dot(&self.b, &self.c), 0.5)?;
        }
        if self.order >= 3 {
            let c2: Vec<f64> = self.c.iter().map(|x| x * x).collect();
            check("b.c^2".into(), dot(&self.b, &c2), 1.0 / 3.0)?;
            for (tag, a) in &parts {
                check(
                    format!("b.A{tag}c"),
                    dot(&self.b, &mat_vec(a, &self.c)),
                    1.0 / 6.0,
                )?;
            }
        }
        if self.order >= 4 {
            let c2: Vec<f64> = self.c.iter().map(|x| x * x).collect();
            let c3: Vec<f64> = self.c.iter().map(|x| x * x * x).collect();
            check("b.c^3".into(), dot(&self.b, &c3), 0.25)?;
            for (tag, a) in &parts {
                let ac = mat_vec(a, &self.c);
                let bc_ac: f64 = (0..s).map(|i| self.b[i] * self.c[i] * ac[i]).sum();
                check(format!("b.(c*A{tag}c)"), bc_ac, 1.0 / 8.0)?;
                check(format!("b.A{tag}c^2"), dot(&self.b, &mat_vec(a, &c2)), 1.0 / 12.0)?;
            }
            for (tag1, a1) in &parts {
                for (tag2, a2) in &parts {
                    let inner = mat_vec(a2, &self.c);
                    check(
                        format!("b.A{tag1}A{tag2}c"),
                        dot(&self.b, &mat_vec(a1, &inner)),
                        1.0 / 24.0,
                    )?;
                }
            }
        }
        Ok(())
    }
}

fn parse_number(token: &str) -> Result<f64, TableauError> {
    let bad = || TableauError::BadNumber(token.to_string());
    if let Some((p, q)) = token.split_once('/') {
        let num: f64 = p.trim().parse().map_err(|_| bad())?;
        let den: f64 = q.trim().parse().map_err(|_| bad())?;
        if den == 0.0 {
            return Err(bad());
        }
        Ok(num / den)
    } else {
        token.parse().map_err(|_| bad())
    }
}

fn parse_row(line: &str) -> Result<Vec<f64>, TableauError> {
    line.split_whitespace().map(parse_number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn builtins_validate() {
        for key in ["ark436", "ark548", "rk4"] {
            let t = ArkTableau::builtin(key).unwrap();
            assert_eq!(t.stages(), t.c.len());
            t.validate().unwrap();
        }
        assert!(ArkTableau::builtin("ark999").is_none());
        assert!(ArkTableau::ark436().is_implicit());
        assert!(!ArkTableau::rk4().is_implicit());
    }

    #[test]
    fn corrupted_entries_are_caught() {
        let mut t = ArkTableau::ark436();
        t.a_explicit[3][1] += 1e-3;
        assert!(matches!(
            t.validate(),
            Err(TableauError::RowSum { part: "explicit", stage: 3, .. })
        ));

        let mut t = ArkTableau::ark436();
        t.a_implicit[4][2] += 1e-3;
        t.a_implicit[4][3] -= 1e-3; // row sum still right, order condition isn't
        assert!(matches!(t.validate(), Err(TableauError::OrderCondition { .. })));

        let mut t = ArkTableau::rk4();
        t.b = vec![0.25; 4];
        assert!(matches!(t.validate(), Err(TableauError::OrderCondition { .. })));
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert!(matches!(
            ArkTableau::parse("order 4\nc 0\nb 1\na_explicit\n0\na_implicit\n0\n"),
            Err(TableauError::MissingField("name"))
        ));
        assert!(matches!(
            ArkTableau::parse("name x\norder q\n"),
            Err(TableauError::BadNumber(_))
        ));
        assert!(matches!(
            ArkTableau::parse("name x\nnonsense\n"),
            Err(TableauError::UnexpectedLine(_))
        ));
    }

    #[test]
    fn fractions_and_comments_parse() {
        let text = "\
# one-stage explicit Euler
name euler
order 1
c 0
b 1
a_explicit
0
a_implicit
0
";
        let t = ArkTableau::parse(text).unwrap();
        assert_eq!(t.name, "euler");
        assert_eq!(t.stages(), 1);
        assert_eq!(parse_number("-2260/8211").unwrap(), -2260.0 / 8211.0);
        assert!(parse_number("1/0").is_err());
    }

    /// Stability functions of both parts, `R(z) = 1 + z b^T (I - z A)^{-1} 1`,
    /// evaluated by forward substitution (the matrices are lower
    /// triangular).
    fn stability(a: &[Vec<f64>], b: &[f64], z: Complex64) -> Complex64 {
        let s = b.len();
        let mut x = vec![Complex64::new(0.0, 0.0); s];
        for i in 0..s {
            let mut rhs = Complex64::new(1.0, 0.0);
            for j in 0..i {
                rhs += z * a[i][j] * x[j];
            }
            x[i] = rhs / (Complex64::new(1.0, 0.0) - z * a[i][i]);
        }
        let sum: Complex64 = b.iter().zip(&x).map(|(&bi, &xi)| bi * xi).sum();
        Complex64::new(1.0, 0.0) + z * sum
    }

    /// The Taylor moments `b^T A^(j-1) 1 = 1/j!` hold through the scheme
    /// order for each part separately; the first failing moment confirms
    /// the order is not accidentally higher.
    #[test]
    fn stability_moments_match_exponential() {
        for key in ["ark436", "ark548", "rk4"] {
            let t = ArkTableau::builtin(key).unwrap();
            for a in [&t.a_explicit, &t.a_implicit] {
                if a.iter().all(|r| r.iter().all(|&x| x == 0.0)) {
                    continue;
                }
                let s = t.stages();
                let mut v = vec![1.0; s];
                let mut factorial = 1.0;
                for j in 1..=t.order {
                    factorial *= j as f64;
                    let m: f64 = t.b.iter().zip(&v).map(|(b, x)| b * x).sum();
                    assert!(
                        (m - 1.0 / factorial).abs() < 1e-12,
                        "{key}: moment {j} = {m}, want {}",
                        1.0 / factorial
                    );
                    v = a
                        .iter()
                        .map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum())
                        .collect();
                }
                factorial *= (t.order + 1) as f64;
                let m: f64 = t.b.iter().zip(&v).map(|(b, x)| b * x).sum();
                assert!(
                    (m - 1.0 / factorial).abs() > 1e-6,
                    "{key}: order looks higher than declared"
                );
            }
        }
    }

    /// The implicit parts are L-stable: `|R(z)| -> 0` as `Re z -> -inf`,
    /// and `|R(z)| <= 1` far out on the imaginary axis.
    #[test]
    fn implicit_parts_are_l_stable() {
        for key in ["ark436", "ark548"] {
            let t = ArkTableau::builtin(key).unwrap();
            let far = stability(&t.a_implicit, &t.b, Complex64::new(-1e8, 0.0));
            assert!(far.norm() < 1e-6, "{key}: |R(-1e8)| = {}", far.norm());
            for y in [1e2, 1e4, 1e6] {
                let r = stability(&t.a_implicit, &t.b, Complex64::new(0.0, y));
                assert!(r.norm() <= 1.0 + 1e-12, "{key}: |R({y} i)| = {}", r.norm());
            }
        }
    }

    /// Near the origin both stability functions approximate `exp(z)` to
    /// the classical order.
    #[test]
    fn stability_functions_approximate_exp() {
        for key in ["ark436", "ark548", "rk4"] {
            let t = ArkTableau::builtin(key).unwrap();
            for (a, used) in [
                (&t.a_explicit, true),
                (&t.a_implicit, t.is_implicit()),
            ] {
                if !used {
                    continue;
                }
                let err = |h: f64| {
                    (stability(a, &t.b, Complex64::new(h, 0.0)) - Complex64::new(h.exp(), 0.0))
                        .norm()
                };
                let (e1, e2) = (err(0.2), err(0.1));
                let slope = (e1 / e2).log2();
                assert!(
                    slope > t.order as f64 + 0.5,
                    "{key}: stability error slope {slope}"
                );
            }
        }
    }
}
