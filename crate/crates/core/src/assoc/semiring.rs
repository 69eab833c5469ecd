//! Value semirings over 64-bit counts.
//!
//! A semiring (⊕, ⊗) has:
//! - ⊕ associative and commutative, with identity `zero`
//! - ⊗ associative, distributing over ⊕, with identity `one`
//! - `zero` annihilating under ⊗
//!
//! | Semiring     | ⊕   | ⊗   | zero       | one        |
//! |--------------|-----|-----|------------|------------|
//! | `PLUS_TIMES` | +   | ×   | 0          | 1          |
//! | `MAX_PLUS`   | max | +   | `i64::MIN` | 0          |
//! | `MIN_PLUS`   | min | +   | `i64::MAX` | 0          |
//! | `MAX_MIN`    | max | min | `i64::MIN` | `i64::MAX` |
//!
//! `MAX_MIN` is the lattice (union-intersection) semiring restricted to
//! totally ordered values. Operations return `None` on overflow.

use std::fmt;

use super::Value;

/// A checked binary operation on values; `None` means overflow.
pub type BinaryOp = fn(Value, Value) -> Option<Value>;

#[derive(Clone, Copy)]
pub struct ValueSemiring {
    pub name: &'static str,
    pub plus: BinaryOp,
    pub times: BinaryOp,
    pub zero: Value,
    pub one: Value,
}

impl fmt::Debug for ValueSemiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ValueSemiring")
            .field("name", &self.name)
            .field("zero", &self.zero)
            .field("one", &self.one)
            .finish()
    }
}

impl PartialEq for ValueSemiring {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

pub fn checked_plus(a: Value, b: Value) -> Option<Value> {
    a.checked_add(b)
}

pub fn checked_times(a: Value, b: Value) -> Option<Value> {
    a.checked_mul(b)
}

fn max(a: Value, b: Value) -> Option<Value> {
    Some(a.max(b))
}

fn min(a: Value, b: Value) -> Option<Value> {
    Some(a.min(b))
}

// -inf annihilates
fn tropical_max_times(a: Value, b: Value) -> Option<Value> {
    if a == Value::MIN || b == Value::MIN {
        return Some(Value::MIN);
    }
    match a.checked_add(b) {
        Some(Value::MIN) | None => None,
        v => v,
    }
}

// +inf annihilates
fn tropical_min_times(a: Value, b: Value) -> Option<Value> {
    if a == Value::MAX || b == Value::MAX {
        return Some(Value::MAX);
    }
    match a.checked_add(b) {
        Some(Value::MAX) | None => None,
        v => v,
    }
}

impl ValueSemiring {
    pub const PLUS_TIMES: ValueSemiring = ValueSemiring {
        name: "plus_times",
        plus: checked_plus,
        times: checked_times,
        zero: 0,
        one: 1,
    };

    pub const MAX_PLUS: ValueSemiring = ValueSemiring {
        name: "max_plus",
        plus: max,
        times: tropical_max_times,
        zero: Value::MIN,
        one: 0,
    };

    pub const MIN_PLUS: ValueSemiring = ValueSemiring {
        name: "min_plus",
        plus: min,
        times: tropical_min_times,
        zero: Value::MAX,
        one: 0,
    };

    pub const MAX_MIN: ValueSemiring = ValueSemiring {
        name: "max_min",
        plus: max,
        times: min,
        zero: Value::MIN,
        one: Value::MAX,
    };

    pub const ALL: [ValueSemiring; 4] = [
        Self::PLUS_TIMES,
        Self::MAX_PLUS,
        Self::MIN_PLUS,
        Self::MAX_MIN,
    ];

    pub fn by_name(name: &str) -> Option<ValueSemiring> {
        Self::ALL.into_iter().find(|sr| sr.name == name)
    }
}

impl Default for ValueSemiring {
    fn default() -> Self {
        Self::PLUS_TIMES
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Small magnitudes keep the checked arithmetic away from overflow so
    // the laws are tested rather than the overflow path.
    fn small() -> impl Strategy<Value = Value> {
        prop_oneof![
            8 => -1000i64..1000,
            1 => Just(Value::MIN),
            1 => Just(Value::MAX),
        ]
    }

    fn law_holds(sr: &ValueSemiring, a: Value, b: Value, c: Value) -> Result<(), TestCaseError> {
        let p = sr.plus;
        let t = sr.times;
        // Only check laws where every intermediate is representable.
        let eval = || -> Option<_> {
            Some((
                (p(p(a, b)?, c)?, p(a, p(b, c)?)?),
                (p(a, b)?, p(b, a)?),
                (t(a, p(b, c)?)?, p(t(a, b)?, t(a, c)?)?),
                (t(p(b, c)?, a)?, p(t(b, a)?, t(c, a)?)?),
                (t(t(a, b)?, c)?, t(a, t(b, c)?)?),
            ))
        };
        if let Some((assoc, comm, left, right, tassoc)) = eval() {
            prop_assert_eq!(assoc.0, assoc.1, "{} plus associativity", sr.name);
            prop_assert_eq!(comm.0, comm.1, "{} plus commutativity", sr.name);
            prop_assert_eq!(left.0, left.1, "{} left distributivity", sr.name);
            prop_assert_eq!(right.0, right.1, "{} right distributivity", sr.name);
            prop_assert_eq!(tassoc.0, tassoc.1, "{} times associativity", sr.name);
        }
        Ok(())
    }

    proptest! {
        #[test]
        fn shipped_semirings_obey_laws(a in small(), b in small(), c in small()) {
            for sr in ValueSemiring::ALL {
                if sr == ValueSemiring::PLUS_TIMES
                    && [a, b, c].iter().any(|v| *v == Value::MIN || *v == Value::MAX)
                {
                    continue;
                }
                law_holds(&sr, a, b, c)?;
            }
        }

        #[test]
        fn identities_and_annihilation(a in -1000i64..1000) {
            for sr in ValueSemiring::ALL {
                prop_assert_eq!((sr.plus)(a, sr.zero), Some(a));
                prop_assert_eq!((sr.plus)(sr.zero, a), Some(a));
                prop_assert_eq!((sr.times)(a, sr.one), Some(a));
                prop_assert_eq!((sr.times)(sr.one, a), Some(a));
                prop_assert_eq!((sr.times)(a, sr.zero), Some(sr.zero));
                prop_assert_eq!((sr.times)(sr.zero, a), Some(sr.zero));
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(checked_plus(Value::MAX, 1), None);
        assert_eq!(checked_times(Value::MAX, 2), None);
        assert_eq!((ValueSemiring::MAX_PLUS.times)(Value::MAX, 1), None);
        assert_eq!((ValueSemiring::MIN_PLUS.times)(Value::MIN, -1), None);
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(ValueSemiring::by_name("max_min"), Some(ValueSemiring::MAX_MIN));
        assert!(ValueSemiring::by_name("or_and").is_none());
    }
}
