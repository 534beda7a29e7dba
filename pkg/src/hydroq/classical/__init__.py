"""Classical baselines: SVM (SMO), KNN, OLS, AR, CART, random forest, boosting."""

from .boosting import BoostModel, fit_adaboost, fit_gbrt
from .knn import knn_predict
from .linear import ArModel, OlsModel, ar_forecast, fit_ar, fit_ols, r2_score
from .stumps import Stump, fit_stump
from .svm import SvmModel, svm_decision, svm_predict, train_svm_smo
from .trees import ForestModel, TreeModel, fit_forest, fit_tree

__all__ = [
    "ArModel",
    "BoostModel",
    "ForestModel",
    "OlsModel",
    "Stump",
    "SvmModel",
    "TreeModel",
    "ar_forecast",
    "fit_adaboost",
    "fit_ar",
    "fit_forest",
    "fit_gbrt",
    "fit_ols",
    "fit_stump",
    "fit_tree",
    "knn_predict",
    "r2_score",
    "svm_decision",
    "svm_predict",
    "train_svm_smo",
]
