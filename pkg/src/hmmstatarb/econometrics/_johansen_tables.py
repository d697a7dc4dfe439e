"""Simulated asymptotic quantiles of the Johansen trace statistic, constant
restricted to the cointegrating relation.  Generated by
tools/gen_johansen_tables.py (reps=100000, steps=1000, seed=19990401).
"""

PROBS = (0.010, 0.020, 0.030, 0.040, 0.050, 0.060, 0.070, 0.080, 0.090, 0.100, 0.110, 0.120, 0.130, 0.140, 0.150, 0.160, 0.170, 0.180, 0.190, 0.200, 0.210, 0.220, 0.230, 0.240, 0.250, 0.260, 0.270, 0.280, 0.290, 0.300, 0.310, 0.320, 0.330, 0.340, 0.350, 0.360, 0.370, 0.380, 0.390, 0.400, 0.410, 0.420, 0.430, 0.440, 0.450, 0.460, 0.470, 0.480, 0.490, 0.500, 0.510, 0.520, 0.530, 0.540, 0.550, 0.560, 0.570, 0.580, 0.590, 0.600, 0.610, 0.620, 0.630, 0.640, 0.650, 0.660, 0.670, 0.680, 0.690, 0.700, 0.710, 0.720, 0.730, 0.740, 0.750, 0.760, 0.770, 0.780, 0.790, 0.800, 0.810, 0.820, 0.830, 0.840, 0.850, 0.860, 0.870, 0.880, 0.890, 0.900, 0.910, 0.920, 0.930, 0.940, 0.950, 0.960, 0.970, 0.980, 0.990, 0.995, 0.999)

# dimension (k - r) -> quantiles at PROBS
QUANTILES = {
    1: (0.5997, 0.7353, 0.8419, 0.9327, 1.0140, 1.0898, 1.1594, 1.2235, 1.2847, 1.3486, 1.4083, 1.4662, 1.5212, 1.5758, 1.6335, 1.6877, 1.7392, 1.7893, 1.8402, 1.8916, 1.9422, 1.9896, 2.0389, 2.0911, 2.1418, 2.1900, 2.2408, 2.2895, 2.3414, 2.3908, 2.4407, 2.4898, 2.5429, 2.5932, 2.6406, 2.6926, 2.7445, 2.7940, 2.8440, 2.8982, 2.9516, 3.0040, 3.0619, 3.1156, 3.1714, 3.2299, 3.2862, 3.3426, 3.3971, 3.4532, 3.5093, 3.5675, 3.6276, 3.6890, 3.7482, 3.8153, 3.8776, 3.9436, 4.0109, 4.0783, 4.1474, 4.2200, 4.2908, 4.3631, 4.4401, 4.5183, 4.5981, 4.6772, 4.7639, 4.8546, 4.9402, 5.0281, 5.1249, 5.2225, 5.3231, 5.4293, 5.5290, 5.6437, 5.7603, 5.8898, 6.0175, 6.1537, 6.2992, 6.4355, 6.5909, 6.7604, 6.9339, 7.1211, 7.3282, 7.5534, 7.8061, 8.0942, 8.3904, 8.7431, 9.1516, 9.6699, 10.3246, 11.1703, 12.6742, 14.2088, 17.7413),
    2: (4.4973, 5.0337, 5.4224, 5.7328, 5.9738, 6.2023, 6.4076, 6.6001, 6.7694, 6.9475, 7.1032, 7.2472, 7.3883, 7.5271, 7.6696, 7.7959, 7.9229, 8.0459, 8.1709, 8.2884, 8.4046, 8.5157, 8.6272, 8.7402, 8.8518, 8.9540, 9.0609, 9.1653, 9.2672, 9.3695, 9.4744, 9.5791, 9.6761, 9.7748, 9.8754, 9.9721, 10.0751, 10.1743, 10.2744, 10.3763, 10.4838, 10.5852, 10.6865, 10.7851, 10.8867, 10.9889, 11.0884, 11.1956, 11.2973, 11.4029, 11.5037, 11.6106, 11.7173, 11.8252, 11.9433, 12.0518, 12.1657, 12.2846, 12.3976, 12.5159, 12.6397, 12.7563, 12.8768, 13.0046, 13.1305, 13.2645, 13.4005, 13.5296, 13.6593, 13.7971, 13.9388, 14.0881, 14.2375, 14.3867, 14.5384, 14.7066, 14.8822, 15.0604, 15.2479, 15.4402, 15.6303, 15.8319, 16.0457, 16.2677, 16.5050, 16.7473, 17.0101, 17.3014, 17.5951, 17.9157, 18.2853, 18.6796, 19.1384, 19.6416, 20.2001, 20.9601, 21.8385, 23.1130, 25.1581, 27.1186, 31.3274),
    3: (12.4113, 13.4200, 14.0492, 14.5702, 15.0172, 15.4071, 15.7309, 16.0499, 16.3351, 16.6015, 16.8399, 17.0770, 17.3069, 17.5060, 17.7178, 17.9179, 18.1176, 18.3054, 18.4896, 18.6692, 18.8350, 19.0100, 19.1815, 19.3579, 19.5212, 19.6890, 19.8508, 20.0064, 20.1595, 20.3151, 20.4671, 20.6288, 20.7861, 20.9225, 21.0669, 21.2217, 21.3716, 21.5150, 21.6648, 21.8153, 21.9674, 22.1156, 22.2581, 22.4087, 22.5587, 22.6973, 22.8542, 23.0098, 23.1615, 23.3089, 23.4563, 23.6074, 23.7593, 23.9135, 24.0652, 24.2203, 24.3805, 24.5359, 24.6821, 24.8422, 25.0132, 25.1848, 25.3636, 25.5440, 25.7123, 25.8973, 26.0876, 26.2700, 26.4553, 26.6449, 26.8359, 27.0310, 27.2315, 27.4300, 27.6523, 27.8715, 28.0938, 28.3191, 28.5571, 28.8160, 29.0792, 29.3461, 29.6249, 29.9204, 30.2322, 30.5505, 30.8898, 31.2659, 31.6638, 32.0763, 32.5467, 33.0499, 33.6200, 34.2800, 35.0489, 35.9665, 37.0658, 38.6007, 41.0495, 43.4743, 48.8365),
    4: (24.3224, 25.7202, 26.6707, 27.4012, 28.0025, 28.5411, 29.0430, 29.4716, 29.8740, 30.2554, 30.5883, 30.9211, 31.2458, 31.5402, 31.8247, 32.1111, 32.3784, 32.6407, 32.8890, 33.1350, 33.3747, 33.6218, 33.8442, 34.0736, 34.2888, 34.5132, 34.7237, 34.9265, 35.1274, 35.3267, 35.5230, 35.7352, 35.9404, 36.1380, 36.3295, 36.5215, 36.7187, 36.9138, 37.1091, 37.3005, 37.4979, 37.6963, 37.8893, 38.0826, 38.2761, 38.4488, 38.6335, 38.8237, 39.0413, 39.2347, 39.4324, 39.6298, 39.8178, 40.0193, 40.2318, 40.4234, 40.6201, 40.8315, 41.0401, 41.2415, 41.4598, 41.6728, 41.8882, 42.1030, 42.3310, 42.5576, 42.7890, 43.0214, 43.2557, 43.4891, 43.7472, 44.0089, 44.2723, 44.5380, 44.8027, 45.0890, 45.3823, 45.6777, 45.9650, 46.2821, 46.5994, 46.9322, 47.2706, 47.6303, 48.0129, 48.4103, 48.8051, 49.2537, 49.7394, 50.2375, 50.8191, 51.4514, 52.1884, 52.9735, 53.8802, 54.9322, 56.2918, 58.0815, 61.0434, 63.9416, 70.1470),
    5: (39.9776, 41.9137, 43.2271, 44.2276, 45.0230, 45.6986, 46.3088, 46.8584, 47.3405, 47.8269, 48.2756, 48.6894, 49.0718, 49.4490, 49.8322, 50.1821, 50.4888, 50.8089, 51.1129, 51.4286, 51.7273, 52.0123, 52.3090, 52.5851, 52.8691, 53.1517, 53.4252, 53.7013, 53.9693, 54.2284, 54.4894, 54.7371, 54.9818, 55.2290, 55.4801, 55.7187, 55.9618, 56.1980, 56.4373, 56.6811, 56.9188, 57.1780, 57.4105, 57.6460, 57.8929, 58.1335, 58.3818, 58.6148, 58.8472, 59.0934, 59.3291, 59.5671, 59.8105, 60.0458, 60.2798, 60.5276, 60.7887, 61.0455, 61.2907, 61.5371, 61.7912, 62.0466, 62.3080, 62.5733, 62.8307, 63.0975, 63.3810, 63.6452, 63.9247, 64.2255, 64.5164, 64.8126, 65.1391, 65.4444, 65.7731, 66.0934, 66.4253, 66.7639, 67.1272, 67.5124, 67.9057, 68.2997, 68.7266, 69.1790, 69.6497, 70.1382, 70.6598, 71.1989, 71.7439, 72.3669, 73.0626, 73.7573, 74.5742, 75.4805, 76.5100, 77.8018, 79.3648, 81.3907, 84.8576, 88.1587, 95.3199),
    6: (59.9490, 62.1684, 63.6379, 64.8233, 65.8380, 66.7142, 67.4623, 68.1273, 68.7167, 69.2973, 69.8503, 70.3276, 70.7754, 71.2293, 71.6686, 72.0805, 72.5239, 72.8995, 73.2928, 73.6677, 74.0282, 74.3627, 74.7106, 75.0769, 75.4101, 75.7219, 76.0343, 76.3595, 76.6776, 76.9766, 77.2888, 77.5906, 77.9121, 78.2097, 78.5049, 78.7945, 79.0862, 79.3739, 79.6675, 79.9474, 80.2436, 80.5382, 80.8107, 81.0914, 81.3739, 81.6536, 81.9283, 82.2175, 82.4969, 82.7734, 83.0439, 83.3236, 83.6164, 83.8849, 84.1808, 84.4840, 84.7645, 85.0669, 85.3696, 85.6721, 85.9835, 86.2787, 86.5973, 86.9093, 87.2331, 87.5400, 87.8666, 88.1941, 88.5262, 88.8710, 89.2239, 89.5778, 89.9304, 90.3079, 90.6867, 91.0912, 91.4873, 91.9011, 92.3289, 92.7346, 93.2088, 93.6640, 94.1389, 94.6275, 95.1234, 95.6492, 96.2294, 96.8482, 97.5365, 98.2332, 98.9910, 99.8896, 100.8432, 101.9412, 103.0860, 104.4441, 106.1893, 108.6540, 112.4548, 116.1365, 124.0630),
}

# dimension -> (mean, variance), used for the gamma tail beyond the table
MOMENTS = {
    1: (4.0557, 6.9112),
    2: (12.0366, 19.6091),
    3: (23.9350, 37.9461),
    4: (39.8715, 62.4704),
    5: (59.6876, 92.8590),
    6: (83.3843, 128.9554),
}
