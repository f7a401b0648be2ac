//! Constructors for the group families used by the classification and the
//! catalog. Each documents its canonical generators.

use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

use super::{Permutation, PermutationGroup};
use crate::error::{Error, Result};

/// Largest prime accepted by [`psl2`] without the explicit override.
pub const PSL2_DEFAULT_MAX_PRIME: u64 = 31;

fn cycle_on(n: usize) -> Permutation {
    Permutation::from_images_unchecked((0..n as u32).map(|i| (i + 1) % n as u32).collect())
}

/// `Z/n` on `n` points, generated by the `n`-cycle `(0 1 .. n-1)`.
pub fn cyclic(n: usize) -> Result<PermutationGroup> {
    if n == 0 {
        return Err(Error::InvalidGroup("cyclic(0)".into()));
    }
    let gens = if n == 1 { vec![] } else { vec![cycle_on(n)] };
    PermutationGroup::new(format!("Z/{n}"), n, gens)
}

/// Dihedral group of order `2n`. For `n ≥ 3` it acts on the `n`-gon with
/// generators rotation `i ↦ i+1` and reflection `i ↦ -i`; smaller `n` use
/// the regular representation with the same two generators.
pub fn dihedral(n: usize) -> Result<PermutationGroup> {
    if n == 0 {
        return Err(Error::InvalidGroup("dihedral(0)".into()));
    }
    let name = format!("Dih{n}");
    if n >= 3 {
        let rot = cycle_on(n);
        let refl = Permutation::from_images_unchecked(
            (0..n as u32).map(|i| (n as u32 - i) % n as u32).collect(),
        );
        return PermutationGroup::new(name, n, vec![rot, refl]);
    }
    let m = n as i64;
    regular_representation(
        name,
        (0i64, 0u8),
        vec![(1 % m, 0), (0, 1)],
        move |&(k, e), &(l, f)| {
            let l = if e == 1 { -l } else { l };
            ((k + l).rem_euclid(m), e ^ f)
        },
    )
}

/// `S_n` on `n` points, generated by `(0 1)` and `(0 1 .. n-1)`.
pub fn symmetric(n: usize) -> Result<PermutationGroup> {
    if n == 0 {
        return Err(Error::InvalidGroup("symmetric(0)".into()));
    }
    let gens = match n {
        1 => vec![],
        2 => vec![cycle_on(2)],
        _ => vec![Permutation::from_cycles(n, &[&[0, 1]])?, cycle_on(n)],
    };
    PermutationGroup::new(format!("S{n}"), n, gens)
}

/// `A_n` on `n` points, generated by the 3-cycles `(0 1 i)`, `2 ≤ i < n`.
pub fn alternating(n: usize) -> Result<PermutationGroup> {
    if n == 0 {
        return Err(Error::InvalidGroup("alternating(0)".into()));
    }
    let mut gens = Vec::new();
    for i in 2..n as u32 {
        gens.push(Permutation::from_cycles(n, &[&[0, 1, i]])?);
    }
    PermutationGroup::new(format!("A{n}"), n, gens)
}

/// `G × H` acting on the disjoint union of the two point sets; generators
/// are those of `G` followed by those of `H`.
pub fn direct_product(g: &PermutationGroup, h: &PermutationGroup) -> PermutationGroup {
    let degree = g.degree() + h.degree();
    let mut gens: Vec<Permutation> = g.generators().iter().map(|p| p.embed(0, degree)).collect();
    gens.extend(h.generators().iter().map(|p| p.embed(g.degree(), degree)));
    PermutationGroup::new(format!("{}x{}", g.name(), h.name()), degree, gens).unwrap()
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `PSL_2(F_p)` on the projective line `{0, .., p-1, ∞=p}`, generated by
/// `z ↦ z+1` and `z ↦ -1/z`. Primes above [`PSL2_DEFAULT_MAX_PRIME`] need
/// [`psl2_unbounded`].
pub fn psl2(p: u64) -> Result<PermutationGroup> {
    if p > PSL2_DEFAULT_MAX_PRIME {
        return Err(Error::Unsupported(format!(
            "psl2({p}): primes above {PSL2_DEFAULT_MAX_PRIME} need the explicit override"
        )));
    }
    psl2_unbounded(p)
}

pub fn psl2_unbounded(p: u64) -> Result<PermutationGroup> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidGroup(format!("psl2({p}): p must be an odd prime")));
    }
    let inf = p as u32;
    let translate: Vec<u32> = (0..=p as u32)
        .map(|z| if z == inf { inf } else { (z + 1) % p as u32 })
        .collect();
    let invert: Vec<u32> = (0..=p as u32)
        .map(|z| {
            if z == inf {
                0
            } else if z == 0 {
                inf
            } else {
                let zi = mod_inverse(z as u64, p);
                ((p - zi) % p) as u32
            }
        })
        .collect();
    PermutationGroup::new(
        format!("PSL2({p})"),
        p as usize + 1,
        vec![
            Permutation::from_images(translate)?,
            Permutation::from_images(invert)?,
        ],
    )
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime: a^(p-2)
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// Dicyclic group `⟨a, x | a^{2n}, x² = a^n, x a x⁻¹ = a⁻¹⟩` of order `4n`
/// in its regular representation, generators `a`, `x`. `dicyclic(2)` is `Q8`.
pub fn dicyclic(n: usize) -> Result<PermutationGroup> {
    if n < 1 {
        return Err(Error::InvalidGroup("dicyclic(0)".into()));
    }
    let m = 2 * n as i64;
    let half = n as i64;
    regular_representation(
        format!("Dic{n}"),
        (0i64, 0u8),
        vec![(1 % m, 0), (0, 1)],
        move |&(k, e), &(l, f)| match (e, f) {
            (0, _) => ((k + l).rem_euclid(m), f),
            (_, 0) => ((k - l).rem_euclid(m), 1),
            _ => ((k - l + half).rem_euclid(m), 0),
        },
    )
}

/// Metacyclic `Z/n ⋊ Z/m` where the generator of `Z/m` acts by `a ↦ r·a`;
/// regular representation with generators `(1,0)` and `(0,1)`.
pub fn metacyclic(n: u64, m: u64, r: u64) -> Result<PermutationGroup> {
    if n == 0 || m == 0 || mod_pow(r, m, n) != 1 % n || super::gcd(r, n) != 1 {
        return Err(Error::InvalidGroup(format!(
            "metacyclic({n},{m},{r}): r must be a unit with r^m = 1 mod n"
        )));
    }
    regular_representation(
        format!("Z/{n}:Z/{m}"),
        (0u64, 0u64),
        vec![(1 % n, 0), (0, 1 % m)],
        move |&(a, b), &(c, d)| ((a + mod_pow(r, b, n) * c) % n, (b + d) % m),
    )
}

fn mod_pow(base: u64, mut e: u64, n: u64) -> u64 {
    let mut result = 1 % n;
    let mut b = base % n;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % n;
        }
        b = b * b % n;
        e >>= 1;
    }
    result
}

/// `SL_2(F_3)` in its regular representation, generated by
/// `[[1,1],[0,1]]` and `[[0,1],[2,0]]`.
pub fn sl2_3() -> Result<PermutationGroup> {
    regular_representation(
        "SL(2,3)".to_string(),
        [1u8, 0, 0, 1],
        vec![[1, 1, 0, 1], [0, 1, 2, 0]],
        |a, b| {
            [
                (a[0] * b[0] + a[1] * b[2]) % 3,
                (a[0] * b[1] + a[1] * b[3]) % 3,
                (a[2] * b[0] + a[3] * b[2]) % 3,
                (a[2] * b[1] + a[3] * b[3]) % 3,
            ]
        },
    )
}

/// `Z/3 ⋊ Dih4` (order 24) where the rotation of `Dih4` inverts `Z/3` and
/// the reflection centralizes it, so the kernel of the action is a Klein
/// four-group. Regular representation; generators `(1; e)`, `(0; r)`, `(0; s)`.
pub fn z3_semidirect_dih4() -> Result<PermutationGroup> {
    // element (a, k, e) = a · r^k s^e
    regular_representation(
        "Z/3:Dih4".to_string(),
        (0i64, 0i64, 0u8),
        vec![(1, 0, 0), (0, 1, 0), (0, 0, 1)],
        |&(a, k, e), &(b, l, f)| {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let l2 = if e == 1 { -l } else { l };
            ((a + sign * b).rem_euclid(3), (k + l2).rem_euclid(4), e ^ f)
        },
    )
}

/// Generalized dihedral group of `Z/3 × Z/3`: translations of `F_3²` and
/// the inversion `x ↦ -x`, acting on the 9 points of the plane.
pub fn generalized_dihedral_3x3() -> Result<PermutationGroup> {
    let idx = |x: i64, y: i64| (x.rem_euclid(3) * 3 + y.rem_euclid(3)) as u32;
    let mut tx = vec![0u32; 9];
    let mut ty = vec![0u32; 9];
    let mut inv = vec![0u32; 9];
    for x in 0..3 {
        for y in 0..3 {
            let i = idx(x, y) as usize;
            tx[i] = idx(x + 1, y);
            ty[i] = idx(x, y + 1);
            inv[i] = idx(-x, -y);
        }
    }
    PermutationGroup::new(
        "(Z/3xZ/3):Z/2",
        9,
        vec![
            Permutation::from_images(tx)?,
            Permutation::from_images(ty)?,
            Permutation::from_images(inv)?,
        ],
    )
}

/// Left regular representation of the group generated by `gens` under
/// `mul`, on its elements in breadth-first discovery order.
pub fn regular_representation<T, F>(
    name: String,
    identity: T,
    gens: Vec<T>,
    mul: F,
) -> Result<PermutationGroup>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut elements = vec![identity.clone()];
    index.insert(identity, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let y = mul(g, &elements[i]);
            if !index.contains_key(&y) {
                index.insert(y.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(y);
            }
        }
    }
    let n = elements.len();
    let perms = gens
        .iter()
        .map(|g| {
            let images = elements.iter().map(|h| index[&mul(g, h)] as u32).collect();
            Permutation::from_images(images)
        })
        .collect::<Result<Vec<_>>>()?;
    PermutationGroup::new(name, n, perms)
}

/// Parses group references such as `psl2:7`, `cyclic:6`, `sym:5`, `alt:5`,
/// `dihedral:4`, `dicyclic:3`. Returns `None` for names this module does not
/// recognize (they may be catalog names).
pub fn parse_family(spec: &str, allow_large: bool) -> Option<Result<PermutationGroup>> {
    let (family, arg) = spec.split_once(':')?;
    let n: u64 = match arg.trim().parse() {
        Ok(n) => n,
        Err(_) => return Some(Err(Error::InvalidGroup(format!("bad parameter in {spec:?}")))),
    };
    let us = n as usize;
    Some(match family.trim().to_ascii_lowercase().as_str() {
        "psl2" => {
            if allow_large {
                psl2_unbounded(n)
            } else {
                psl2(n)
            }
        }
        "cyclic" | "z" => cyclic(us),
        "dihedral" | "dih" => dihedral(us),
        "sym" | "symmetric" | "s" => symmetric(us),
        "alt" | "alternating" | "a" => alternating(us),
        "dicyclic" | "dic" => dicyclic(us),
        _ => return None,
    })
}
