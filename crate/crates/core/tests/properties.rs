mod common;

use common::properties;

#[test]
fn tensor_symmetries() {
    properties::tensor_symmetries().unwrap();
}

#[test]
fn unit_normal_identities() {
    properties::unit_normal_identities().unwrap();
}

#[test]
fn integrand_evenness() {
    properties::integrand_evenness().unwrap();
}

#[test]
fn grid_refinement() {
    properties::grid_refinement().unwrap();
}

#[test]
fn symbolic_derivatives() {
    properties::symbolic_derivatives().unwrap();
}
