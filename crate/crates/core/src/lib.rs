pub mod agent;
pub mod benchmark;
pub mod component_model;
pub mod page_tree;
pub mod registry;

#[cfg(test)]
mod testkit;
