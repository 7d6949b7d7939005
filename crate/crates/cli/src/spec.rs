//! Parsing of base-category and functor arguments.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twarrow::artifact::{self, Artifact, StoredFunctor, TwDump};
use twarrow::category::{pointed_op, simplex_category, FinCategory};
use twarrow::collections::{build_operad, OperadSpec};
use twarrow::exactla::Field;
use twarrow::qcohom::{constant, eta_shriek, f_ass_delta, f_operad, gamma_t, random_cokernel, representable, zero, LinearFunctor, TwBase};

/// A base category named on the command line.
pub enum Base {
    Gamma(FinCategory),
    Delta(FinCategory),
    Tw(TwBase),
    File(FinCategory),
}

impl Base {
    /// `gamma:N`, `delta:N`, `tw:OPERAD:N`, or a category / tw_category document.
    pub fn parse(s: &str) -> Result<Base> {
        if let Some(n) = s.strip_prefix("gamma:") {
            return Ok(Base::Gamma(pointed_op(n.parse().context("gamma:N needs an integer")?)));
        }
        if let Some(n) = s.strip_prefix("delta:") {
            return Ok(Base::Delta(simplex_category(n.parse().context("delta:N needs an integer")?)));
        }
        if let Some(rest) = s.strip_prefix("tw:") {
            let (operad, n) = rest.rsplit_once(':').ok_or_else(|| anyhow!("expected tw:OPERAD:N"))?;
            let n: usize = n.parse().context("tw:OPERAD:N needs an integer N")?;
            return Ok(Base::Tw(tw_base(operad, n)?));
        }
        let doc = artifact::parse(&std::fs::read_to_string(Path::new(s)).with_context(|| format!("reading base {s}"))?)?;
        let cat = match doc.kind.as_str() {
            "tw_category" => TwDump::from_document(&doc)?.category()?,
            _ => FinCategory::from_document(&doc)?,
        };
        Ok(Base::File(cat))
    }

    pub fn category(&self) -> &FinCategory {
        match self {
            Base::Gamma(c) | Base::Delta(c) | Base::File(c) => c,
            Base::Tw(b) => &b.table,
        }
    }
}

/// `Tw(P)≤n`; the operad is truncated one arity higher so that every
/// encoding morphism between objects of arity ≤ n is present.
pub fn tw_base(operad: &str, n: usize) -> Result<TwBase> {
    let spec: OperadSpec = operad.parse()?;
    Ok(TwBase::new(&build_operad(&spec, n + 1)?, n)?)
}

/// Functor arguments: `t`, `f-operad`, `eta`, `f-ass`, `const:C`, `zero`,
/// `rep:X`, `random:G,R` or `file:PATH`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorSpec {
    T,
    FOperad,
    Eta,
    FAss,
    Constant(usize),
    Zero,
    Representable(usize),
    Random { gens: usize, relations: usize },
    File(String),
}

impl std::str::FromStr for FunctorSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, tail) = s.split_once(':').map_or((s, None), |(h, t)| (h, Some(t)));
        Ok(match (head, tail) {
            ("t", None) => FunctorSpec::T,
            ("f-operad", None) => FunctorSpec::FOperad,
            ("eta", None) => FunctorSpec::Eta,
            ("f-ass", None) => FunctorSpec::FAss,
            ("zero", None) => FunctorSpec::Zero,
            ("const", Some(c)) => FunctorSpec::Constant(c.parse().context("const:C needs an integer")?),
            ("rep", Some(x)) => FunctorSpec::Representable(x.parse().context("rep:X needs an object index")?),
            ("random", Some(t)) => {
                let (g, r) = t.split_once(',').ok_or_else(|| anyhow!("expected random:GENS,RELATIONS"))?;
                FunctorSpec::Random { gens: g.parse()?, relations: r.parse()? }
            }
            ("file", Some(p)) => FunctorSpec::File(p.to_string()),
            _ => bail!("unknown functor spec {s:?}"),
        })
    }
}

impl std::fmt::Display for FunctorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctorSpec::T => f.write_str("t"),
            FunctorSpec::FOperad => f.write_str("f-operad"),
            FunctorSpec::Eta => f.write_str("eta"),
            FunctorSpec::FAss => f.write_str("f-ass"),
            FunctorSpec::Zero => f.write_str("zero"),
            FunctorSpec::Constant(c) => write!(f, "const:{c}"),
            FunctorSpec::Representable(x) => write!(f, "rep:{x}"),
            FunctorSpec::Random { gens, relations } => write!(f, "random:{gens},{relations}"),
            FunctorSpec::File(p) => write!(f, "file:{p}"),
        }
    }
}

impl FunctorSpec {
    pub fn is_random(&self) -> bool {
        matches!(self, FunctorSpec::Random { .. })
    }

    pub fn build<F: Field>(&self, base: &Base, field: &F, seed: u64) -> Result<LinearFunctor<F>> {
        let cat = base.category();
        Ok(match (self, base) {
            (FunctorSpec::T, Base::Gamma(c)) => gamma_t(c, field)?,
            (FunctorSpec::FOperad, Base::Tw(b)) => f_operad(&b.tw, field)?,
            (FunctorSpec::Eta, Base::Delta(c)) => eta_shriek(c, field)?,
            (FunctorSpec::FAss, Base::Delta(c)) => f_ass_delta(c, field)?,
            (FunctorSpec::T | FunctorSpec::FOperad | FunctorSpec::Eta | FunctorSpec::FAss, _) => {
                bail!("{self} is not defined on this base")
            }
            (FunctorSpec::Constant(c), _) => constant(cat, field, *c)?,
            (FunctorSpec::Zero, _) => zero(cat, field)?,
            (FunctorSpec::Representable(x), _) => representable(cat, field, *x)?,
            (FunctorSpec::Random { gens, relations }, _) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                random_cokernel(cat, field, *gens, *relations, &mut rng)?
            }
            (FunctorSpec::File(path), _) => {
                let stored: StoredFunctor = artifact::load(Path::new(path))?;
                let (mut mine, mut theirs) = (cat.to_dump(), stored.base.clone());
                mine.name.clear();
                theirs.name.clear();
                if mine != theirs {
                    bail!("{path} lives on {}, not on {}", stored.base.name, cat.name());
                }
                stored.functor(cat, field)?
            }
        })
    }
}

/// Inclusive `a..b`.
pub fn degrees(s: &str) -> Result<(i64, i64)> {
    let (a, b) = s.split_once("..").ok_or_else(|| anyhow!("degrees must look like a..b"))?;
    let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        bail!("empty degree range {s}");
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use twarrow::category::Category;

    #[test]
    fn functor_specs_roundtrip() {
        for s in ["t", "f-operad", "eta", "f-ass", "zero", "const:3", "rep:2", "random:2,1", "file:x.json"] {
            assert_eq!(s.parse::<FunctorSpec>().unwrap().to_string(), s);
        }
        assert!("random:2".parse::<FunctorSpec>().is_err());
        assert!("rep".parse::<FunctorSpec>().is_err());
    }

    #[test]
    fn degree_ranges() {
        assert_eq!(degrees("-1..3").unwrap(), (-1, 3));
        assert!(degrees("3..1").is_err());
        assert!(degrees("3").is_err());
    }

    #[test]
    fn bases_parse() {
        assert_eq!(Base::parse("gamma:2").unwrap().category().num_objects(), 3);
        assert_eq!(Base::parse("tw:com:2").unwrap().category().num_objects(), 3);
        assert!(Base::parse("no/such/file").is_err());
    }
}
