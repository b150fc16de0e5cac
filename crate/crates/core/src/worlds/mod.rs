//! Executable worlds: a hospital scheduling simulator and a labelling user
//! for constraint acquisition, each with its loop bindings.

pub mod conacq;
pub mod hospital;

pub use conacq::{
    conacq_classify, make_conacq, AcquisitionLearner, AcquisitionWorld, ConacqBindings, ConacqChannels, ConacqConfig,
    ConacqError, ConacqObservation, QuerySolver, NO_QUERY,
};
pub use hospital::{
    hospital_apply, hospital_observe, make_hospital, prediction_error, HospitalBindings, HospitalChannels,
    HospitalConfig, HospitalError, HospitalObservation, HospitalSchedule, HospitalWorld, RegressionLearner,
    ScheduleSolver, TaskTemplate,
};
