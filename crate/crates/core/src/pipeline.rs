//! The full early turn-taking model: feature encoder, one STDP-trained
//! network per selected feature, NHNF descriptors and an SVM.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{self, GridConfig, TrainedClassifier};
use crate::encoding::{EncoderConfig, FeatureEncoder, RawEvent, TurnLabel};
use crate::features::{assemble_descriptor, fit_normalizer, nhnf, Descriptor, DescriptorNormalizer, NHNF_BINS};
use crate::provenance::FoldTag;
use crate::snn::{
    make_network, train_weights, FiringMap, Network, NetworkConfig, Simulator, StdpConfig, StimulusSchedule,
    WeightsFile, SAMPLE_MS,
};
use crate::{check_format_version, derive_seed, CttmError, Result, FORMAT_VERSION};

/// How long each encoded event is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DurationPolicy {
    /// Every event runs for the same number of milliseconds.
    Fixed { ms: u32 },
    /// The stimulated span of the event plus a fixed quiet tail.
    InputPlusTail { tail_ms: u32 },
}

impl Default for DurationPolicy {
    fn default() -> Self {
        DurationPolicy::Fixed { ms: SAMPLE_MS }
    }
}

impl DurationPolicy {
    pub fn duration(&self, schedule: &StimulusSchedule) -> u32 {
        match *self {
            DurationPolicy::Fixed { ms } => ms,
            DurationPolicy::InputPlusTail { tail_ms } => schedule.span() + tail_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CttmConfig {
    pub encoder: EncoderConfig,
    pub network: NetworkConfig,
    pub stdp: StdpConfig,
    /// STDP training samples per network.
    pub presentations: usize,
    pub nhnf_bins: usize,
    pub duration: DurationPolicy,
    pub grid: GridConfig,
}

impl Default for CttmConfig {
    fn default() -> Self {
        CttmConfig {
            encoder: EncoderConfig::default(),
            network: NetworkConfig::default(),
            stdp: StdpConfig::default(),
            presentations: 1000,
            nhnf_bins: NHNF_BINS,
            duration: DurationPolicy::default(),
            grid: GridConfig::default(),
        }
    }
}

impl CttmConfig {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.stdp.validate()?;
        if self.encoder.n_excitatory != self.network.n_excitatory {
            return Err(CttmError::InvalidConfig(
                "encoder and network disagree on the excitatory population size".into(),
            ));
        }
        if self.nhnf_bins == 0 || !self.network.n_neurons().is_multiple_of(self.nhnf_bins) {
            return Err(CttmError::InvalidConfig(format!(
                "{} histogram bins do not divide {} neurons",
                self.nhnf_bins,
                self.network.n_neurons()
            )));
        }
        if let DurationPolicy::Fixed { ms: 0 } = self.duration {
            return Err(CttmError::InvalidConfig("simulation duration must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CttmModel {
    pub config: CttmConfig,
    pub seed: u64,
    pub encoder: FeatureEncoder,
    pub networks: Vec<Network>,
    pub normalizer: DescriptorNormalizer,
    pub classifier: TrainedClassifier,
    pub tag: FoldTag,
}

fn rasters(
    networks: &[Network],
    schedules: &[StimulusSchedule],
    duration: DurationPolicy,
    sim: &mut Simulator,
) -> Result<Vec<FiringMap>> {
    networks
        .iter()
        .zip(schedules)
        .map(|(net, s)| sim.run(net, s, duration.duration(s).max(1)))
        .collect()
}

fn descriptor_of(maps: &[FiringMap], bins: usize) -> Result<Descriptor> {
    let hists = maps.iter().map(|m| nhnf(m, bins)).collect::<Result<Vec<_>>>()?;
    assemble_descriptor(&hists)
}

impl CttmModel {
    /// Fit every stage on `train` only.
    pub fn fit(train: &[&RawEvent], config: &CttmConfig, seed: u64, tag: FoldTag) -> Result<CttmModel> {
        config.validate()?;
        let encoder = FeatureEncoder::fit(train, &config.encoder, tag.clone())?;
        let schedules: Vec<Vec<StimulusSchedule>> = train
            .par_iter()
            .map(|e| encoder.schedules(e))
            .collect::<Result<_>>()?;

        let networks = (0..encoder.n_features())
            .into_par_iter()
            .map(|f| {
                let mut net = make_network(derive_seed(seed, &[1, f as u64]), &config.network)?;
                let own: Vec<StimulusSchedule> = schedules.iter().map(|s| s[f].clone()).collect();
                train_weights(&mut net, &own, config.presentations, &config.stdp, derive_seed(seed, &[2, f as u64]))?;
                Ok(net)
            })
            .collect::<Result<Vec<_>>>()?;

        let descriptors: Vec<Descriptor> = schedules
            .par_iter()
            .map_init(
                || Simulator::new(&networks[0]),
                |sim, s| descriptor_of(&rasters(&networks, s, config.duration, sim)?, config.nhnf_bins),
            )
            .collect::<Result<_>>()?;
        let normalizer = fit_normalizer(&descriptors, tag.clone())?;
        let x: Vec<Vec<f64>> = descriptors
            .iter()
            .map(|d| normalizer.apply(d).map(|d| d.0))
            .collect::<Result<_>>()?;
        let y: Vec<TurnLabel> = train.iter().map(|e| e.label).collect();
        let classifier = classifier::fit(&x, &y, &config.grid, derive_seed(seed, &[3]), tag.clone())?;
        log::debug!(
            "fitted model for {:?}: {:?}, {} support vectors",
            tag.fold,
            classifier.params,
            classifier.coef.len()
        );
        Ok(CttmModel {
            config: config.clone(),
            seed,
            encoder,
            networks,
            normalizer,
            classifier,
            tag,
        })
    }

    /// One firing raster per selected feature.
    pub fn firing_maps(&self, event: &RawEvent) -> Result<Vec<FiringMap>> {
        let schedules = self.encoder.schedules(event)?;
        rasters(&self.networks, &schedules, self.config.duration, &mut Simulator::new(&self.networks[0]))
    }

    /// Unnormalized NHNF descriptor.
    pub fn descriptor(&self, event: &RawEvent) -> Result<Descriptor> {
        descriptor_of(&self.firing_maps(event)?, self.config.nhnf_bins)
    }

    pub fn decision_value(&self, event: &RawEvent) -> Result<f64> {
        self.normalizer.tag.check_same(&self.tag)?;
        self.classifier.meta.tag.check_same(&self.tag)?;
        let x = self.normalizer.apply(&self.descriptor(event)?)?;
        self.classifier.decision_value(&x.0)
    }

    pub fn predict(&self, event: &RawEvent) -> Result<TurnLabel> {
        Ok(if self.decision_value(event)? > 0.0 {
            TurnLabel::Give
        } else {
            TurnLabel::Keep
        })
    }

    pub fn predict_batch(&self, events: &[RawEvent]) -> Result<Vec<TurnLabel>> {
        events.par_iter().map(|e| self.predict(e)).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ModelFile {
            format_version: FORMAT_VERSION,
            config: self.config.clone(),
            seed: self.seed,
            encoder: self.encoder.clone(),
            networks: self.networks.iter().map(Network::to_weights_file).collect(),
            normalizer: self.normalizer.clone(),
            classifier: self.classifier.clone(),
            tag: self.tag.clone(),
        };
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        serde_json::to_writer(&mut w, &file)?;
        std::io::Write::flush(&mut w)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CttmModel> {
        let file: ModelFile = serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(path)?))?;
        check_format_version(file.format_version)?;
        let networks = file
            .networks
            .iter()
            .map(Network::from_weights_file)
            .collect::<Result<Vec<_>>>()?;
        if networks.len() != file.encoder.n_features() {
            return Err(CttmError::InvalidInput(format!(
                "model has {} networks for {} features",
                networks.len(),
                file.encoder.n_features()
            )));
        }
        Ok(CttmModel {
            config: file.config,
            seed: file.seed,
            encoder: file.encoder,
            networks,
            normalizer: file.normalizer,
            classifier: file.classifier,
            tag: file.tag,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    config: CttmConfig,
    seed: u64,
    encoder: FeatureEncoder,
    networks: Vec<WeightsFile>,
    normalizer: DescriptorNormalizer,
    classifier: TrainedClassifier,
    tag: FoldTag,
}
