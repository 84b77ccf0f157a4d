use serde::{Deserialize, Serialize};

/// Serializable description of an ambient group.
///
/// JSON form: `{"kind": "...", ...parameters}`, e.g.
/// `{"kind": "cyclic", "n": 6}` or `{"kind": "psl2", "p": 5}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    Cyclic {
        n: u64,
    },
    DirectProduct {
        factors: Vec<GroupSpec>,
    },
    /// Subgroup of `Sym(0..degree)` generated by image arrays.
    Permutation {
        degree: usize,
        generators: Vec<Vec<u8>>,
    },
    /// Subgroup of `GL_dim(Z/qZ)` generated by row-major matrices.
    MatrixModQ {
        dim: usize,
        modulus: u64,
        generators: Vec<Vec<Vec<i64>>>,
    },
    Psl2 {
        p: u64,
    },
    HeisenbergZ,
    FreeAbelian {
        d: usize,
    },
    FreeGroup {
        rank: usize,
    },
    /// The prime field as a ring. Only the sum-product statistics accept it.
    FpRing {
        p: u64,
    },
}

impl GroupSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupSpec::Cyclic { .. } => "cyclic",
            GroupSpec::DirectProduct { .. } => "direct-product",
            GroupSpec::Permutation { .. } => "permutation",
            GroupSpec::MatrixModQ { .. } => "matrix-mod-q",
            GroupSpec::Psl2 { .. } => "psl2",
            GroupSpec::HeisenbergZ => "heisenberg-z",
            GroupSpec::FreeAbelian { .. } => "free-abelian",
            GroupSpec::FreeGroup { .. } => "free-group",
            GroupSpec::FpRing { .. } => "fp-ring",
        }
    }

    /// Symmetric group on `n` points generated by `(0 1)` and `(0 1 … n-1)`.
    pub fn symmetric(n: usize) -> Self {
        let mut t: Vec<u8> = (0..n as u8).collect();
        if n >= 2 {
            t.swap(0, 1);
        }
        let c: Vec<u8> = (0..n).map(|i| ((i + 1) % n) as u8).collect();
        GroupSpec::Permutation {
            degree: n,
            generators: vec![t, c],
        }
    }

    /// Dihedral group of order `2m` acting on the vertices of an `m`-gon.
    pub fn dihedral(m: usize) -> Self {
        let rot: Vec<u8> = (0..m).map(|i| ((i + 1) % m) as u8).collect();
        let refl: Vec<u8> = (0..m).map(|i| ((m - i) % m) as u8).collect();
        GroupSpec::Permutation {
            degree: m,
            generators: vec![rot, refl],
        }
    }

    /// Quaternion group Q8 in its regular representation on 8 points.
    ///
    /// Points encode `±1, ±i, ±j, ±k` as `sign*4 + unit` with units
    /// `1, i, j, k = 0, 1, 2, 3`; generators are left multiplication by `i`
    /// and by `j`.
    pub fn quaternion() -> Self {
        // unit products: table[a][b] = (sign, unit) for a*b
        const TABLE: [[(u8, u8); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let left = |u: usize| -> Vec<u8> {
            (0..8)
                .map(|pt| {
                    let (s, b) = (pt / 4, pt % 4);
                    let (s2, c) = TABLE[u][b];
                    ((s as u8 + s2) % 2) * 4 + c
                })
                .collect()
        };
        GroupSpec::Permutation {
            degree: 8,
            generators: vec![left(1), left(2)],
        }
    }

    /// Unitriangular 3×3 matrices over `Z/nZ` generated by the two
    /// elementary matrices.
    pub fn heisenberg_mod(n: u64) -> Self {
        GroupSpec::MatrixModQ {
            dim: 3,
            modulus: n,
            generators: vec![
                vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]],
                vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]],
            ],
        }
    }

    /// Parse a short textual form (`cyclic:6`, `psl2:5`, `sym:4`, `dihedral:4`,
    /// `q8`, `heisenberg`, `heis-mod:8`, `free-abelian:2`, `free:2`, `fp:13`)
    /// or a JSON object.
    pub fn parse(text: &str) -> crate::Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            return Ok(serde_json::from_str(text)?);
        }
        let (name, arg) = match text.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let num = |field: &str| -> crate::Result<u64> {
            arg.ok_or_else(|| crate::Error::spec(field, "missing parameter"))?
                .parse::<u64>()
                .map_err(|e| crate::Error::spec(field, e.to_string()))
        };
        Ok(match name {
            "cyclic" | "z" => GroupSpec::Cyclic { n: num("n")? },
            "psl2" => GroupSpec::Psl2 { p: num("p")? },
            "sym" => GroupSpec::symmetric(num("degree")? as usize),
            "dihedral" => GroupSpec::dihedral(num("m")? as usize),
            "q8" | "quaternion" => GroupSpec::quaternion(),
            "heisenberg" | "heisenberg-z" => GroupSpec::HeisenbergZ,
            "heis-mod" => GroupSpec::heisenberg_mod(num("modulus")?),
            "free-abelian" | "zd" => GroupSpec::FreeAbelian { d: num("d")? as usize },
            "free" | "free-group" => GroupSpec::FreeGroup {
                rank: num("rank")? as usize,
            },
            "fp" | "fp-ring" => GroupSpec::FpRing { p: num("p")? },
            other => return Err(crate::Error::spec("kind", format!("unknown group `{other}`"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_shorthand() {
        let s: GroupSpec = serde_json::from_str(r#"{"kind":"psl2","p":5}"#).unwrap();
        assert_eq!(s, GroupSpec::Psl2 { p: 5 });
        assert_eq!(GroupSpec::parse("psl2:5").unwrap(), s);
        assert_eq!(
            GroupSpec::parse(r#"{"kind":"heisenberg-z"}"#).unwrap(),
            GroupSpec::HeisenbergZ
        );
        assert!(serde_json::from_str::<GroupSpec>(r#"{"kind":"cyclic","n":6,"m":1}"#).is_err());
        assert!(GroupSpec::parse("cyclic:x").is_err());
        assert!(GroupSpec::parse("banana").is_err());
    }
}
