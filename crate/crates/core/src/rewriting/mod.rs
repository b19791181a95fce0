pub mod collect;
pub mod coset;
pub mod prefix;
pub mod push;

pub use collect::{collect_normal_form, CollectedForm, CollectionData};
pub use coset::{coset_normal_form, CosetNormalForm, CosetTables};
pub use prefix::{measure_prefix_growth, PrefixGrowthReport, PrefixMode};
pub use push::{push_right, verify_push, PushResult, RewriteContext, RewriteTrace};
