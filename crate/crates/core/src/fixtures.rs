//! The example programs and annotations shipped in `fixtures/`.

pub const POSITION_OO: &str = include_str!("../../../fixtures/position.oo");
pub const POSITION_SUP: &str = include_str!("../../../fixtures/position.sup");
pub const LOOPADD_OO: &str = include_str!("../../../fixtures/loopadd.oo");
/// Weight `T*X2 + X1 + X2 + X3`, which satisfies the criterion.
pub const LOOPADD_FIXED_SUP: &str = include_str!("../../../fixtures/loopadd_fixed.sup");
/// Weight `T*X3 + X1 + X2`, which does not.
pub const LOOPADD_PAPER_SUP: &str = include_str!("../../../fixtures/loopadd_paper.sup");
pub const DOUBLE_OO: &str = include_str!("../../../fixtures/double.oo");
pub const DOUBLE_SUP: &str = include_str!("../../../fixtures/double.sup");
pub const WHILE_TRUE_OO: &str = include_str!("../../../fixtures/while_true.oo");
pub const NESTED_OO: &str = include_str!("../../../fixtures/nested.oo");
pub const WHILEADD_OO: &str = include_str!("../../../fixtures/whileadd.oo");
pub const WHILEADD_SUP: &str = include_str!("../../../fixtures/whileadd.sup");
