"""Reference chip data: published unitaries and phase tables, transcribed verbatim.

Matrix entries are rounded to 3-4 decimals in the source, so the fixtures are
only unitary to ~5e-3. U5T was sampled from the Haar distribution and realized
as a triangular mesh (see RECK5_* for its element parameters); U7T and U9T were
sampled from the random-phases ensemble with the phase tables PHASES7/PHASES9
(rows = modes top to bottom, columns = layers left to right). U5R and U7R are
the unitaries reconstructed from photon-counting data.
"""
import numpy as np

U5T = np.array([
    [0.212 + 0j, -0.018 + 0.165j, -0.238 - 0.18j, -0.429 + 0.32j, -0.715 + 0.2j],
    [-0.193 - 0.388j, -0.045 - 0.379j, 0.19 + 0.311j, 0.328 - 0.269j, -0.594 + 0.03j],
    [-0.723 + 0.363j, 0.087 - 0.09j, -0.076 - 0.155j, 0.206 + 0.443j, -0.153 - 0.193j],
    [-0.092 + 0.045j, -0.148 - 0.645j, -0.588 + 0.184j, -0.369 - 0.086j, 0.167 + 0.025j],
    [0.318 - 0.009j, -0.144 - 0.594j, 0.452 - 0.405j, 0.037 + 0.387j, 0.071 + 0.025j],
])

U5R = np.array([
    [0.370 + 0j, 0.007 + 0.151j, -0.164 - 0.31j, -0.442 + 0.138j, -0.702 + 0.099j],
    [-0.109 - 0.465j, -0.013 - 0.585j, 0.121 + 0.381j, 0.076 - 0.134j, -0.474 - 0.147j],
    [-0.677 + 0.180j, 0.134 - 0.027j, -0.283 - 0.133j, 0.036 + 0.498j, -0.206 - 0.319j],
    [-0.039 + 0.240j, -0.080 - 0.572j, -0.496 - 0.046j, -0.475 - 0.220j, 0.265 + 0.125j],
    [0.262 + 0.133j, 0.090 - 0.524j, 0.479 - 0.377j, 0.055 + 0.486j, 0.143 + 0.007j],
])

_U7T_RE = [
    [0.4425, -0.1165, -0.1488, 0.4638, 0.1579, 0.0794, 0.0],
    [-0.1399, -0.4259, -0.1446, 0.0255, -0.0794, 0.1579, 0.0],
    [-0.0407, 0.0883, 0.5283, 0.2971, -0.1533, -0.0246, 0.1383],
    [0.6001, 0.3919, -0.205, -0.4029, -0.2782, -0.1281, 0.2082],
    [-0.1749, 0.0259, -0.2427, 0.1622, -0.1493, -0.2798, -0.0683],
    [-0.0259, -0.1749, 0.073, -0.1255, 0.2164, -0.3516, 0.1798],
    [0.0, 0.0, -0.0576, -0.2433, -0.4469, 0.1336, -0.5942],
]
_U7T_IM = [
    [0.0, -0.271, -0.6244, 0.1661, -0.0794, 0.1579, 0.0],
    [0.5437, -0.5791, 0.2894, 0.0161, -0.1579, -0.0794, 0.0],
    [-0.253, -0.3246, -0.0445, -0.3622, -0.1533, -0.4588, 0.2082],
    [0.0265, -0.2588, 0.1053, -0.0722, -0.1775, -0.1004, -0.1383],
    [0.0259, 0.1749, -0.1019, 0.4779, -0.2428, -0.6334, -0.2194],
    [-0.1749, 0.0259, 0.1096, 0.1911, -0.6708, 0.2806, 0.3694],
    [0.0, 0.0, -0.2433, 0.0576, -0.0615, -0.0134, 0.548],
]
U7T = np.array(_U7T_RE) + 1j * np.array(_U7T_IM)

_U7R_RE = [
    [0.4452, -0.1619, -0.0803, 0.3911, 0.1092, 0.0209, -0.0081],
    [-0.1373, -0.4556, -0.1317, 0.0791, -0.0755, 0.0837, 0.0001],
    [-0.0416, 0.0536, 0.4685, 0.3431, -0.1754, -0.055, 0.0912],
    [0.6524, 0.3148, -0.1802, -0.3467, -0.2841, -0.2602, 0.2024],
    [-0.1626, -0.0474, -0.2752, 0.1311, -0.1485, -0.2213, -0.0441],
    [-0.0704, -0.1444, 0.0106, -0.106, 0.3, -0.3859, 0.1749],
    [0.0001, -0.0067, -0.0768, -0.2394, -0.4011, 0.0415, -0.6603],
]
_U7R_IM = [
    [0.0, -0.2345, -0.7213, 0.1138, 0.0039, 0.1245, 0.0016],
    [0.3705, -0.7084, 0.2681, -0.0592, -0.1077, -0.1061, 0.0001],
    [-0.4088, -0.1521, -0.0212, -0.3293, -0.2072, -0.4918, 0.179],
    [0.0715, -0.1923, 0.1248, -0.1292, -0.15, -0.1598, -0.1038],
    [0.0324, 0.154, -0.0879, 0.5484, -0.0376, -0.6209, -0.292],
    [-0.1169, 0.0211, 0.0282, 0.2579, -0.7122, 0.2034, 0.2517],
    [0.0, -0.007, -0.1605, 0.0906, -0.1107, -0.0338, 0.5391],
]
U7R = np.array(_U7R_RE) + 1j * np.array(_U7R_IM)

_U9T_RE = [
    [0.1737, 0.3764, -0.2099, 0.0618, 0.156, 0.0832, 0.0, 0.0, 0.0],
    [0.2093, -0.1192, -0.193, 0.188, -0.1875, 0.0353, -0.1083, -0.0624, 0.0],
    [-0.3979, -0.2573, 0.1942, 0.2589, 0.1764, -0.0378, 0.0624, -0.1083, 0.0],
    [-0.0198, 0.1469, 0.3669, -0.1077, -0.2168, 0.4123, 0.1051, -0.2844, -0.146],
    [-0.0195, 0.3428, -0.5808, -0.2214, -0.0762, 0.2985, 0.319, -0.0395, 0.0997],
    [-0.0433, -0.1173, -0.0321, 0.0354, 0.2657, 0.2604, -0.2291, -0.535, 0.4547],
    [0.1173, -0.0433, -0.0772, -0.2149, 0.2085, -0.3808, 0.0738, 0.2366, 0.0849],
    [0.0, 0.0, -0.1216, 0.0289, 0.362, -0.3342, 0.5234, -0.4918, -0.0882],
    [0.0, 0.0, -0.0289, -0.1216, -0.0368, 0.1977, -0.0343, -0.1498, -0.6324],
]
_U9T_IM = [
    [0.0, -0.6425, -0.3237, -0.4474, -0.0832, 0.156, 0.0, 0.0, 0.0],
    [0.7566, -0.2241, -0.0309, 0.4142, -0.0529, 0.0619, 0.0624, -0.1083, 0.0],
    [0.3374, -0.1194, 0.3813, -0.4619, 0.2872, 0.194, 0.1083, 0.0624, 0.0],
    [-0.1551, -0.1639, 0.0947, 0.2141, -0.0766, 0.2954, 0.5338, 0.0884, 0.0997],
    [0.1591, 0.3216, 0.2771, -0.1147, 0.186, 0.0874, 0.0228, 0.0695, 0.146],
    [-0.1173, 0.0433, -0.1696, 0.1752, 0.1475, 0.2771, -0.3511, 0.0202, 0.0303],
    [-0.0433, -0.1173, -0.0718, 0.2822, 0.4033, 0.3424, 0.1966, 0.495, -0.1054],
    [0.0, 0.0, 0.0289, 0.1216, -0.3066, -0.1135, 0.1344, -0.0901, -0.2633],
    [0.0, 0.0, -0.1216, 0.0289, 0.4462, 0.0092, -0.2397, -0.1164, -0.4843],
]
U9T = np.array(_U9T_RE) + 1j * np.array(_U9T_IM)

# Phase tables: PHASES_M[mode - 1][layer - 1], radians.
PHASES7 = np.array([
    [1.5253, 0.6993, 2.7776, 1.8087],
    [2.6182, 1.5267, 2.956, 1.6449],
    [1.9217, 2.8131, 0.6705, 1.7497],
    [0.7217, 0.4718, 0.9392, 1.5706],
    [2.9256, 1.3138, 2.1079, 2.8032],
    [0.4974, 1.4759, 0.3152, 0.7684],
    [2.0089, 2.9217, 1.347, 2.025],
])

PHASES9 = np.array([
    [2.6429, 2.306, 1.9381, 0.857, 1.5198],
    [2.6199, 0.5196, 0.8464, 2.9378, 2.4199],
    [0.4416, 2.8766, 2.4005, 2.7948, 0.2681],
    [2.6066, 0.6619, 3.0257, 2.1596, 1.8241],
    [2.9507, 0.5332, 0.274, 2.8834, 1.8991],
    [0.9698, 2.6471, 1.2586, 1.9846, 2.3428],
    [0.3772, 2.3326, 0.1867, 0.8455, 2.7346],
    [0.5191, 0.021, 0.3205, 1.3059, 0.771],
    [1.5579, 1.9952, 0.2173, 2.8286, 1.127],
])

# Published triangular-mesh parameters for U5T: transmissivity t_i and the two
# input-arm phases alpha_i, beta_i of each of the 10 beam splitters. The gauge
# (external phases at the 5 inputs and 5 outputs) was fixed by setting
# alpha_1, beta_1, beta_5, beta_8 and beta_10 to zero.
RECK5_T = np.array([0.19, 0.40, 0.48, 0.44, 0.55, 0.54, 0.51, 0.76, 0.99, 0.95])
RECK5_ALPHA = np.array([0.0, 0.64, 0.0, 0.0, 2.21, 0.0, 2.93, 1.08, 2.58, 0.0])
RECK5_BETA = np.array([0.0, 0.0, 1.37, 1.10, 0.0, 1.02, 0.0, 0.0, 0.0, 0.0])

FIXTURES = {"U5t": U5T, "U5r": U5R, "U7t": U7T, "U7r": U7R, "U9t": U9T}
