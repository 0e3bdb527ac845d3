use super::{all_strings, Budget, ClassTag, InstanceStream, Language, Meter};
use crate::base::BinStr;
use crate::error::Result;

/// Strings with an odd number of ones.
#[derive(Debug, Clone, Copy, Default)]
pub struct Parity;

impl Language for Parity {
    fn id(&self) -> &str {
        "parity"
    }

    fn class_tag(&self) -> ClassTag {
        ClassTag::PTIME
    }

    fn validate(&self, _x: &BinStr) -> bool {
        true
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        meter.tick(x.len() as u64 + 1)?;
        Ok(x.count_ones() % 2 == 1)
    }

    fn enumerate(&self, budget: &Budget) -> Result<InstanceStream<'_>> {
        if budget.max_size > 40 {
            return Err(crate::error::Error::scale("parity enumeration beyond length 40"));
        }
        Ok(Box::new(all_strings(budget.min_size, budget.max_size)))
    }
}
