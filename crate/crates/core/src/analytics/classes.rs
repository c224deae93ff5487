use crate::census::expected_census;
use crate::error::{CoronaError, Result};
use crate::params::{checked_pow, exact_div, to_u64, ModelParams};

fn check_birth(n: u32, born: u32) -> Result<()> {
    if born > n {
        return Err(CoronaError::OutOfDomain(format!(
            "birth iteration {born} is later than level {n}"
        )));
    }
    Ok(())
}

/// Strength at level `n` of a vertex born at `born`: `2 (d+2)^(n-born)`.
pub fn closed_strength(delta: u64, n: u32, born: u32) -> Result<u64> {
    check_birth(n, born)?;
    let base = delta.checked_add(2).ok_or(CoronaError::Overflow("delta+2"))?;
    checked_pow(base, n - born, "vertex strength")?
        .checked_mul(2)
        .ok_or(CoronaError::Overflow("vertex strength"))
}

/// Degree at level `n` of a vertex born at `born`:
/// `(2 (d+2)^(n-born) + 2d) / (d+1)`, which is always an integer.
pub fn closed_degree(delta: u64, n: u32, born: u32) -> Result<u64> {
    let s = closed_strength(delta, n, born)? as u128;
    let k = exact_div(s + 2 * delta as u128, delta as u128 + 1, "vertex degree")?;
    to_u64(k, "vertex degree")
}

/// Weight at level `n` of an edge created at `born`: `(1+d)^(n-born)`.
pub fn closed_edge_weight(delta: u64, n: u32, born: u32) -> Result<u64> {
    check_birth(n, born)?;
    let base = delta.checked_add(1).ok_or(CoronaError::Overflow("delta+1"))?;
    checked_pow(base, n - born, "edge weight")
}

/// Number of vertices created at iteration `born`: 3 for the seed,
/// `6 (d+4)^(born-1)` afterwards.
pub fn class_size(delta: u64, born: u32) -> Result<u64> {
    if born == 0 {
        return Ok(3);
    }
    checked_pow(delta + 4, born - 1, "class size")?
        .checked_mul(6)
        .ok_or(CoronaError::Overflow("class size"))
}

/// Number of edges created at iteration `born`: 3 for the seed,
/// `9 (d+4)^(born-1)` afterwards.
pub fn edges_born(delta: u64, born: u32) -> Result<u64> {
    if born == 0 {
        return Ok(3);
    }
    checked_pow(delta + 4, born - 1, "edge class size")?
        .checked_mul(9)
        .ok_or(CoronaError::Overflow("edge class size"))
}

/// One birth class: all members share strength, degree and the weight of
/// the edges created together with them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeClass {
    pub birth: u32,
    pub size: u64,
    pub strength: u64,
    pub degree: u64,
    pub edge_weight: u64,
    pub edges_born: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeClassTable {
    pub params: ModelParams,
    pub rows: Vec<DegreeClass>,
}

pub fn degree_classes(params: ModelParams) -> Result<DegreeClassTable> {
    let (d, n) = (params.delta(), params.levels());
    let rows = (0..=n)
        .map(|born| {
            Ok(DegreeClass {
                birth: born,
                size: class_size(d, born)?,
                strength: closed_strength(d, n, born)?,
                degree: closed_degree(d, n, born)?,
                edge_weight: closed_edge_weight(d, n, born)?,
                edges_born: edges_born(d, born)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DegreeClassTable { params, rows })
}

impl DegreeClassTable {
    /// Checks the class sizes, strengths, degrees and edge weights against
    /// the census: `sum size = N`, `sum size*strength = 2W`,
    /// `sum size*degree = 2E`, `sum edges_born = E`,
    /// `sum edges_born*edge_weight = W`.
    pub fn check_balances(&self) -> Result<()> {
        let c = expected_census(self.params)?;
        let sum = |f: &dyn Fn(&DegreeClass) -> u128| self.rows.iter().map(f).sum::<u128>();
        let checks = [
            ("vertices", sum(&|r| r.size as u128), c.vertices as u128),
            (
                "strength mass",
                sum(&|r| r.size as u128 * r.strength as u128),
                2 * c.total_weight as u128,
            ),
            (
                "degree mass",
                sum(&|r| r.size as u128 * r.degree as u128),
                2 * c.edges as u128,
            ),
            ("edges", sum(&|r| r.edges_born as u128), c.edges as u128),
            (
                "weight mass",
                sum(&|r| r.edges_born as u128 * r.edge_weight as u128),
                c.total_weight as u128,
            ),
        ];
        for (name, got, want) in checks {
            if got != want {
                return Err(CoronaError::Consistency(format!(
                    "class table {name}: {got} != {want}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newborn_values() {
        for d in 1..=5 {
            for n in 0..=4 {
                assert_eq!(closed_strength(d, n, n).unwrap(), 2);
                assert_eq!(closed_degree(d, n, n).unwrap(), 2);
                assert_eq!(closed_edge_weight(d, n, n).unwrap(), 1);
            }
        }
    }

    #[test]
    fn worked_values() {
        assert_eq!(closed_strength(1, 2, 1).unwrap(), 6);
        assert_eq!(closed_strength(1, 1, 0).unwrap(), 6);
        assert_eq!(closed_degree(1, 1, 0).unwrap(), 4);
        assert_eq!(closed_degree(1, 2, 0).unwrap(), 10);
        assert_eq!(closed_edge_weight(1, 2, 0).unwrap(), 4);
        assert_eq!(closed_edge_weight(3, 1, 0).unwrap(), 4);
    }

    #[test]
    fn birth_after_level_is_rejected() {
        assert!(matches!(
            closed_strength(1, 2, 3),
            Err(CoronaError::OutOfDomain(_))
        ));
    }

    #[test]
    fn mass_balances() {
        for d in 1..=4 {
            for n in 0..=8 {
                degree_classes(ModelParams::new(d, n).unwrap())
                    .unwrap()
                    .check_balances()
                    .unwrap();
            }
        }
    }
}
