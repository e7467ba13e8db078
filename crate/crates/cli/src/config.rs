//! Optional TOML config file and the flag/file/default resolution order.
//!
//! Every analysis knob resolves as: command-line flag if given, else config
//! file entry, else the methodology default.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use wavetrace_core::Thresholds;

use crate::args::{FitArgs, SeriesArgs, ThresholdArgs};

pub const DEFAULT_BIN_WIDTH: f64 = 0.02;
pub const DEFAULT_VANISHING_MOMENTS: usize = 3;
pub const DEFAULT_WIDEN: f64 = 1.0;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub monitored: Option<Vec<String>>,
    pub bin_width: Option<f64>,
    pub vanishing_moments: Option<usize>,
    pub large_packet_bytes: Option<u32>,
    pub min_large_packets: Option<u32>,
    pub j1: Option<usize>,
    pub j2: Option<usize>,
    pub seed: Option<u64>,
    pub rank: Option<u32>,
    pub widen: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("bad config file {}", path.display()))
    }

    pub fn thresholds(&self, flags: &ThresholdArgs) -> Thresholds {
        let defaults = Thresholds::default();
        Thresholds {
            large_packet_bytes: flags
                .large_packet_bytes
                .or(self.large_packet_bytes)
                .unwrap_or(defaults.large_packet_bytes),
            min_large_packets: flags
                .min_large_packets
                .or(self.min_large_packets)
                .unwrap_or(defaults.min_large_packets),
        }
    }

    /// (bin_width, vanishing_moments)
    pub fn series_params(&self, flags: &SeriesArgs) -> (f64, usize) {
        (
            flags
                .bin_width
                .or(self.bin_width)
                .unwrap_or(DEFAULT_BIN_WIDTH),
            flags
                .vanishing_moments
                .or(self.vanishing_moments)
                .unwrap_or(DEFAULT_VANISHING_MOMENTS),
        )
    }

    /// Fit-range overrides; `None` components fall back to the per-diagram
    /// automatic choice.
    pub fn fit_range(&self, flags: &FitArgs) -> (Option<usize>, Option<usize>) {
        (flags.j1.or(self.j1), flags.j2.or(self.j2))
    }

    /// Flag-supplied monitored addresses win as a block over the file list.
    pub fn monitored(&self, flags: &[String]) -> Vec<String> {
        if !flags.is_empty() {
            flags.to_vec()
        } else {
            self.monitored.clone().unwrap_or_default()
        }
    }

    pub fn seed(&self, flag: Option<u64>) -> u64 {
        flag.or(self.seed).unwrap_or(0)
    }

    pub fn rank(&self, flag: Option<u32>) -> u32 {
        flag.or(self.rank).unwrap_or(1)
    }

    pub fn widen(&self, flag: Option<f64>) -> f64 {
        flag.or(self.widen).unwrap_or(DEFAULT_WIDEN)
    }
}
