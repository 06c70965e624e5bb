use crate::error::{Error, Result};
use crate::hypothesis::Variable;
use crate::kernels::VariableBlock;

/// Named variable blocks sharing one sample size. The first three blocks play
/// the roles of `X`, `Y` and `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    names: Vec<String>,
    blocks: Vec<VariableBlock>,
}

impl Sample {
    pub fn new(named: Vec<(String, VariableBlock)>) -> Result<Self> {
        let Some(first) = named.first() else {
            return Err(Error::invalid("a sample needs at least one variable"));
        };
        let n = first.1.n();
        let mut names: Vec<String> = Vec::with_capacity(named.len());
        let mut blocks = Vec::with_capacity(named.len());
        for (name, block) in named {
            if block.n() != n {
                return Err(Error::shape(format!(
                    "variable `{name}` has {} rows, expected {n}",
                    block.n()
                )));
            }
            if names.contains(&name) {
                return Err(Error::invalid(format!("duplicate variable `{name}`")));
            }
            names.push(name);
            blocks.push(block);
        }
        Ok(Self { names, blocks })
    }

    pub fn triple(x: VariableBlock, y: VariableBlock, z: VariableBlock) -> Result<Self> {
        Self::new(vec![("x".into(), x), ("y".into(), y), ("z".into(), z)])
    }

    pub fn n(&self) -> usize {
        self.blocks[0].n()
    }

    pub fn num_variables(&self) -> usize {
        self.blocks.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn blocks(&self) -> &[VariableBlock] {
        &self.blocks
    }

    pub fn named(&self, name: &str) -> Option<&VariableBlock> {
        self.names.iter().position(|n| n == name).map(|i| &self.blocks[i])
    }

    pub fn variable(&self, v: Variable) -> Result<&VariableBlock> {
        self.blocks.get(v.index()).ok_or_else(|| {
            Error::invalid(format!(
                "three-variable test on a sample with {} variable(s)",
                self.blocks.len()
            ))
        })
    }

    /// Total number of columns across blocks.
    pub fn width(&self) -> usize {
        self.blocks.iter().map(VariableBlock::d).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> VariableBlock {
        VariableBlock::from_column(v).unwrap()
    }

    #[test]
    fn blocks_must_share_n() {
        assert!(Sample::triple(col(&[1.0, 2.0]), col(&[1.0, 2.0]), col(&[1.0])).is_err());
        assert!(Sample::new(vec![]).is_err());
        let dup = Sample::new(vec![("a".into(), col(&[1.0])), ("a".into(), col(&[2.0]))]);
        assert!(dup.is_err());
    }

    #[test]
    fn roles_follow_block_order() {
        let s = Sample::triple(col(&[1.0]), col(&[2.0]), col(&[3.0])).unwrap();
        assert_eq!(s.variable(Variable::Z).unwrap().point(0), &[3.0]);
        assert_eq!(s.named("y").unwrap().point(0), &[2.0]);
        let pair = Sample::new(vec![("a".into(), col(&[1.0])), ("b".into(), col(&[2.0]))]).unwrap();
        assert!(pair.variable(Variable::Z).is_err());
    }
}
