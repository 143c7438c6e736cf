//! Exhaustive epistasis detection on a spiking pipeline.

pub mod dataset;
pub mod pipeline;
pub mod table;

pub use dataset::{binarize, load_dataset, one_hot, BinarizedSplit, ClassHalf, DatasetError, GenotypeDataset};
pub use pipeline::{
    decode_readout, run_detection, simulate, synthesize, synthesize_half, Detection, EpistasisError,
    PipelineSchedule, RunSummary, Synthesis,
};
pub use table::{chi_square, genotype_index, genotype_tuple, snp_tuples, tables_to_csv, ContingencyTable};
