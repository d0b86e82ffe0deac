#![allow(dead_code)]

pub mod cart_oracle;
pub mod geometry_oracle;
pub mod random_scene;
