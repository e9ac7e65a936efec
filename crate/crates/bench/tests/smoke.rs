//! The benchmark inputs build and run once.

use baxterq_bench::baxterq_core::bulk::LatticeModel;
use baxterq_bench::baxterq_core::operators::{q_operator_at, Assembly};
use baxterq_bench::baxterq_core::verify::{run_check, CheckConfig};
use baxterq_bench::baxterq_core::exact::rat;
use baxterq_bench::baxterq_core::{ChainParams, Sign};

#[test]
fn bench_inputs_are_valid() {
    for l in 2..=4 {
        ChainParams::default_for(l).validate().unwrap();
    }
    let model = LatticeModel::from_params(&ChainParams::default_for(3));
    let q = q_operator_at(&model, 3, Sign::Plus, &rat(2, 7), Assembly::BlockDiagonal).unwrap();
    assert_eq!(q.rows(), 8);
    assert!(run_check("gl_decomposition", &CheckConfig::new(ChainParams::default_for(2))).unwrap().passed());
}
